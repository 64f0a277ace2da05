#include "train/grid_search.hpp"

#include <algorithm>
#include <map>
#include <ostream>
#include <thread>

#include "core/error.hpp"
#include "core/text.hpp"

namespace mdne {

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (index + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

void set_hyperparameter(TrainConfig& config, const std::string& name, double value) {
    if (name == "lambda") config.weights.lambda = value;
    else if (name == "alpha") config.weights.alpha = value;
    else if (name == "upsilon") config.weights.upsilon = value;
    else if (name == "gamma1") config.penalties.gamma1 = value;
    else if (name == "gamma2") config.penalties.gamma2 = value;
    else if (name == "lr") config.lr = value;
    else throw ValidationError("unknown hyperparameter '" + name + "'");
}

double get_hyperparameter(const TrainConfig& config, const std::string& name) {
    if (name == "lambda") return config.weights.lambda;
    if (name == "alpha") return config.weights.alpha;
    if (name == "upsilon") return config.weights.upsilon;
    if (name == "gamma1") return config.penalties.gamma1;
    if (name == "gamma2") return config.penalties.gamma2;
    if (name == "lr") return config.lr;
    throw ValidationError("unknown hyperparameter '" + name + "'");
}

std::vector<GridCell> grid_search(const AttributedNetwork& net, const TrainConfig& base, const Grid& grid,
                                  const Objective& objective, const GridOptions& options) {
    if (grid.empty()) throw ValidationError("grid_search: empty grid");
    for (const auto& [name, values] : grid) {
        if (values.empty()) throw ValidationError("grid_search: no values for '" + name + "'");
        get_hyperparameter(base, name);
    }

    std::vector<double> current;
    for (const auto& [name, values] : grid) current.push_back(get_hyperparameter(base, name));

    std::vector<GridCell> cells;
    std::map<std::vector<double>, std::size_t> seen;

    auto evaluate = [&](const std::vector<std::vector<double>>& combos) {
        std::vector<std::size_t> fresh;
        for (const auto& combo : combos) {
            if (seen.contains(combo)) continue;
            GridCell cell;
            cell.index = cells.size();
            cell.seed = derive_seed(base.seed, cell.index);
            for (std::size_t p = 0; p < grid.size(); ++p) cell.values.emplace_back(grid[p].first, combo[p]);
            seen.emplace(combo, cell.index);
            fresh.push_back(cell.index);
            cells.push_back(std::move(cell));
        }
        auto run = [&](std::size_t idx) {
            GridCell& cell = cells[idx];
            try {
                TrainConfig cfg = base;
                for (const auto& [name, v] : cell.values) set_hyperparameter(cfg, name, v);
                cfg.seed = cell.seed;
                if (options.threads > 1) cfg.threads = 1;
                cell.score = objective(net, cfg);
            } catch (const std::exception& e) {
                cell.error = e.what();
            }
        };
        const auto workers = static_cast<std::size_t>(std::max(1, options.threads));
        for (std::size_t start = 0; start < fresh.size(); start += workers) {
            std::vector<std::jthread> pool;
            const std::size_t end = std::min(fresh.size(), start + workers);
            for (std::size_t i = start + 1; i < end; ++i) pool.emplace_back(run, fresh[i]);
            run(fresh[start]);
        }
    };

    for (std::size_t round = 0; round < options.max_rounds; ++round) {
        bool changed = false;
        for (std::size_t p = 0; p < grid.size(); ++p) {
            std::vector<std::vector<double>> combos;
            for (double v : grid[p].second) {
                auto combo = current;
                combo[p] = v;
                combos.push_back(std::move(combo));
            }
            evaluate(combos);
            std::optional<double> best_score;
            double best_value = current[p];
            for (const auto& combo : combos) {
                const GridCell& cell = cells[seen.at(combo)];
                if (cell.score && (!best_score || *cell.score > *best_score)) {
                    best_score = cell.score;
                    best_value = combo[p];
                }
            }
            if (best_score && best_value != current[p]) {
                current[p] = best_value;
                changed = true;
            }
        }
        if (!changed && round > 0) break;
    }

    std::stable_sort(cells.begin(), cells.end(), [](const GridCell& a, const GridCell& b) {
        if (a.score.has_value() != b.score.has_value()) return a.score.has_value();
        if (a.score && *a.score != *b.score) return *a.score > *b.score;
        return a.index < b.index;
    });
    return cells;
}

void write_grid_csv(const std::vector<GridCell>& cells, std::ostream& out) {
    out << "rank,cell";
    if (!cells.empty()) {
        for (const auto& [name, v] : cells.front().values) out << "," << name;
    }
    out << ",seed,score,error\n";
    for (std::size_t r = 0; r < cells.size(); ++r) {
        const auto& c = cells[r];
        out << r + 1 << "," << c.index;
        for (const auto& [name, v] : c.values) out << "," << text::format_double(v);
        out << "," << c.seed << "," << (c.score ? text::format_double(*c.score) : std::string()) << ",";
        std::string err = c.error;
        std::replace(err.begin(), err.end(), ',', ';');
        std::replace(err.begin(), err.end(), '\n', ' ');
        out << err << "\n";
    }
}

}  // namespace mdne
