#include "gsp/run.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include "json.hpp"

#include "gsp/equilibrium.hpp"
#include "gsp/errors.hpp"
#include "gsp/replay.hpp"

namespace gsp {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string fmt10(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.10g", v);
    return buf;
}

std::string fmt6(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

std::string hash_hex(const std::string& bytes) {
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(fnv1a64(bytes)));
    return buf;
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
        std::size_t comma = line.find(',', start);
        if (comma == std::string::npos) {
            fields.push_back(line.substr(start));
            break;
        }
        fields.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
    return fields;
}

std::string sanitize_filename(const std::string& name) {
    std::string out;
    for (char c : name) {
        bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
                  (c >= '0' && c <= '9') || c == '_' || c == '-' || c == '.';
        out.push_back(ok ? c : '_');
    }
    return out.empty() ? std::string("unnamed") : out;
}

// Collects output files, hashing each, and finishes with manifest.json.
class OutputSink {
public:
    explicit OutputSink(const std::string& dir) : dir_(dir) {
        std::error_code ec;
        fs::create_directories(dir_, ec);
        if (ec) {
            throw ConfigError("cannot create output directory: " + dir_);
        }
    }

    void write_text(const std::string& name, const std::string& content) {
        fs::path path = fs::path(dir_) / name;
        std::ofstream out(path, std::ios::binary);
        if (!out) {
            throw ConfigError("cannot write output file: " + path.string());
        }
        out << content;
        out.flush();
        if (!out) {
            throw ConfigError("cannot write output file: " + path.string());
        }
        hashes_[name] = hash_hex(content);
    }

    void write_manifest(json meta) {
        json outputs = json::object();
        for (const auto& [name, hash] : hashes_) {
            outputs[name] = hash;
        }
        meta["outputs"] = outputs;
        std::string text = meta.dump(2);
        text += '\n';
        fs::path path = fs::path(dir_) / "manifest.json";
        std::ofstream out(path, std::ios::binary);
        if (!out) {
            throw ConfigError("cannot write output file: " + path.string());
        }
        out << text;
    }

private:
    std::string dir_;
    std::map<std::string, std::string> hashes_;
};

const json& require(const json& j, const char* key) {
    if (!j.is_object() || !j.contains(key)) {
        throw ConfigError(std::string("missing config field: ") + key);
    }
    return j.at(key);
}

ValueDistribution parse_dist(const json& j) {
    std::string kind = require(j, "kind").get<std::string>();
    if (kind == "uniform") {
        return ValueDistribution::uniform(j.value("lo", 0.0), j.value("hi", 1.0));
    }
    if (kind == "exponential") {
        return ValueDistribution::exponential(j.value("rate", 1.0));
    }
    if (kind == "lognormal") {
        return ValueDistribution::lognormal(j.value("mu", 0.0), j.value("sigma", 1.0));
    }
    if (kind == "beta22") {
        return ValueDistribution::beta22();
    }
    throw ConfigError("unknown distribution kind: " + kind);
}

PopulationModel parse_population(const json& j) {
    PopulationModel model{parse_dist(require(j, "values")),
                          parse_dist(require(j, "relevances")),
                          j.value("correlation", 0.0)};
    model.validate();
    return model;
}

SlotCurve parse_slots(const json& j) {
    if (j.is_object() && j.contains("effects")) {
        return SlotCurve(j.at("effects").get<std::vector<double>>());
    }
    if (j.is_array()) {
        return SlotCurve(j.get<std::vector<double>>());
    }
    return SlotCurve::geometric(require(j, "count").get<int>(), j.value("decay", 0.5));
}

std::vector<double> parse_grid(const json& j) {
    if (j.is_number()) {
        return {j.get<double>()};
    }
    if (j.is_array()) {
        auto values = j.get<std::vector<double>>();
        if (values.empty()) {
            throw ConfigError("grid must not be empty");
        }
        return values;
    }
    if (j.is_object()) {
        double from = require(j, "from").get<double>();
        double to = require(j, "to").get<double>();
        long points = require(j, "points").get<long>();
        if (points < 1) {
            throw ConfigError("grid needs at least one point");
        }
        std::vector<double> values;
        values.reserve(static_cast<std::size_t>(points));
        if (points == 1) {
            values.push_back(from);
            return values;
        }
        for (long k = 0; k < points; ++k) {
            values.push_back(from + (to - from) * static_cast<double>(k) /
                                        static_cast<double>(points - 1));
        }
        return values;
    }
    throw ConfigError("grid must be a number, an array, or {from,to,points}");
}

struct FamilyTraits {
    bool uses_r = false;
    bool uses_alpha = false;
    bool uses_rho = false;
};

FamilyTraits traits_for(const std::string& family) {
    if (family == "by_bid") return {false, false, true};
    if (family == "standard") return {false, false, true};
    if (family == "standard_filter") return {true, false, false};
    if (family == "squashed") return {false, true, true};
    if (family == "squashed_filter") return {true, true, false};
    if (family == "proposed") return {true, false, true};
    throw ConfigError("unknown ranking family: " + family);
}

RankingSpec make_family_spec(const std::string& family, double r, double alpha,
                             double rho) {
    if (family == "by_bid") return RankingSpec::by_bid(rho);
    if (family == "standard") return RankingSpec::standard(rho);
    if (family == "standard_filter") {
        return r > 0.0 ? RankingSpec::standard_filter(r) : RankingSpec::standard();
    }
    if (family == "squashed") return RankingSpec::squashed(alpha, rho);
    if (family == "squashed_filter") {
        return r > 0.0 ? RankingSpec::squashed_filter(alpha, r)
                       : RankingSpec::squashed(alpha);
    }
    if (family == "proposed") return RankingSpec::proposed(r, rho);
    throw ConfigError("unknown ranking family: " + family);
}

std::vector<double> param_list(const json& j, const char* scalar_key,
                               const char* grid_key, bool applicable,
                               double fallback) {
    bool has_scalar = j.contains(scalar_key);
    bool has_grid = j.contains(grid_key);
    if (!applicable && (has_scalar || has_grid)) {
        throw ConfigError(std::string(scalar_key) +
                          " does not apply to this ranking family");
    }
    if (has_scalar && has_grid) {
        throw ConfigError(std::string("give either ") + scalar_key + " or " +
                          grid_key + ", not both");
    }
    if (has_grid) {
        return parse_grid(j.at(grid_key));
    }
    if (has_scalar) {
        return {j.at(scalar_key).get<double>()};
    }
    return {fallback};
}

void expand_spec_entry(const json& j, std::vector<SpecPoint>* out) {
    std::string family = require(j, "family").get<std::string>();
    FamilyTraits traits = traits_for(family);
    std::string label = j.value("label", family);
    std::vector<double> r_list = param_list(j, "r", "r_grid", traits.uses_r, 0.0);
    std::vector<double> alpha_list =
        param_list(j, "alpha", "alpha_grid", traits.uses_alpha, 1.0);
    std::vector<double> rho_list =
        param_list(j, "rho", "rho_grid", traits.uses_rho, 0.0);
    const double nan = std::numeric_limits<double>::quiet_NaN();
    for (double r : r_list) {
        for (double alpha : alpha_list) {
            for (double rho : rho_list) {
                SpecPoint point;
                point.spec = make_family_spec(family, r, alpha, rho);
                point.family = label;
                point.r = traits.uses_r ? r : nan;
                point.alpha = traits.uses_alpha ? alpha : nan;
                point.rho = traits.uses_rho ? rho : nan;
                out->push_back(std::move(point));
            }
        }
    }
}

ExperimentConfig parse_experiment_json(const json& root) {
    ExperimentConfig cfg{.population = parse_population(require(root, "population")),
                         .bidders = root.value("bidders", 8),
                         .slots = parse_slots(require(root, "slots")),
                         .grid = {},
                         .trials = root.value("trials", static_cast<long>(10000)),
                         .seed = root.value("seed", static_cast<std::uint64_t>(1)),
                         .mode = SweepMode::BneBound};
    std::string mode = root.value("mode", std::string("bound"));
    if (mode == "bound") {
        cfg.mode = SweepMode::BneBound;
    } else if (mode == "lowest_sne") {
        cfg.mode = SweepMode::LowestSne;
    } else {
        throw ConfigError("mode must be bound or lowest_sne");
    }
    const json& specs = require(root, "specs");
    if (!specs.is_array() || specs.empty()) {
        throw ConfigError("specs must be a non-empty array");
    }
    for (const json& entry : specs) {
        expand_spec_entry(entry, &cfg.grid);
    }
    cfg.validate();
    return cfg;
}

// Any failure while interpreting config data is a configuration error.
template <typename Fn>
auto config_phase(Fn&& fn) -> decltype(fn()) {
    try {
        return fn();
    } catch (const ConfigError&) {
        throw;
    } catch (const json::exception& e) {
        throw ConfigError(e.what());
    } catch (const GspError& e) {
        throw ConfigError(e.what());
    }
}

std::string plot_content(const std::vector<PlotRow>& rows) {
    if (rows.empty()) {
        throw InvalidInput("plot data needs at least one row");
    }
    std::string out;
    for (const PlotRow& row : rows) {
        out += fmt17(row.x);
        out += ' ';
        out += fmt17(row.y);
        out += ' ';
        out += fmt17(row.err);
        out += '\n';
    }
    return out;
}

constexpr const char* kSweepHeader =
    "family,r,alpha,rho,revenue,revenue_se,welfare,welfare_se,clicks,clicks_se,trials";

std::string sweep_csv_content(const std::vector<OperatingPoint>& points) {
    std::string out = kSweepHeader;
    out += '\n';
    for (const OperatingPoint& p : points) {
        out += p.family;
        for (double v : {p.r, p.alpha, p.rho, p.revenue, p.revenue_se, p.welfare,
                         p.welfare_se, p.clicks, p.clicks_se}) {
            out += ',';
            out += format_csv_value(v);
        }
        out += ',';
        out += std::to_string(p.trials);
        out += '\n';
    }
    return out;
}

std::string point_summary(const OperatingPoint& p) {
    std::string line = "family=" + p.family;
    if (!std::isnan(p.r)) line += " r=" + fmt6(p.r);
    if (!std::isnan(p.alpha)) line += " alpha=" + fmt6(p.alpha);
    if (!std::isnan(p.rho)) line += " rho=" + fmt6(p.rho);
    line += " revenue=" + fmt6(p.revenue) + " (se " + fmt6(p.revenue_se) + ")";
    line += " welfare=" + fmt6(p.welfare);
    line += " clicks=" + fmt6(p.clicks);
    line += '\n';
    return line;
}

// Pick the x axis for a family's plot file: the first swept parameter, then
// the first applicable one, then the row index.
std::vector<PlotRow> sweep_plot_rows(const std::vector<OperatingPoint>& points) {
    auto param = [](const OperatingPoint& p, int axis) {
        return axis == 0 ? p.r : axis == 1 ? p.alpha : p.rho;
    };
    int chosen = -1;
    for (int axis = 0; axis < 3 && chosen < 0; ++axis) {
        bool seen = false;
        double first = 0.0;
        for (const OperatingPoint& p : points) {
            double v = param(p, axis);
            if (std::isnan(v)) continue;
            if (!seen) {
                seen = true;
                first = v;
            } else if (v != first) {
                chosen = axis;
                break;
            }
        }
    }
    if (chosen < 0) {
        for (int axis = 0; axis < 3 && chosen < 0; ++axis) {
            for (const OperatingPoint& p : points) {
                if (!std::isnan(param(p, axis))) {
                    chosen = axis;
                    break;
                }
            }
        }
    }
    std::vector<PlotRow> rows;
    rows.reserve(points.size());
    for (std::size_t i = 0; i < points.size(); ++i) {
        double x = chosen < 0 ? static_cast<double>(i) : param(points[i], chosen);
        rows.push_back({x, points[i].revenue, points[i].revenue_se});
    }
    return rows;
}

void group_by_family(const std::vector<OperatingPoint>& points,
                     std::vector<std::string>* order,
                     std::map<std::string, std::vector<OperatingPoint>>* groups) {
    for (const OperatingPoint& p : points) {
        if (!groups->count(p.family)) {
            order->push_back(p.family);
        }
        (*groups)[p.family].push_back(p);
    }
}

void cmd_sweep(const json& root, const RunConfig& rc, const std::string& config_hash,
               std::ostream& out, bool do_frontier) {
    ExperimentConfig cfg = config_phase([&] { return parse_experiment_json(root); });
    if (rc.seed_override) cfg.seed = *rc.seed_override;
    if (rc.trials_override) cfg.trials = *rc.trials_override;
    config_phase([&] { cfg.validate(); return 0; });

    FrontierX fx = FrontierX::Welfare;
    if (do_frontier) {
        std::string which = config_phase(
            [&] { return root.value("frontier_x", std::string("welfare")); });
        if (which == "clicks") {
            fx = FrontierX::ClickYield;
        } else if (which != "welfare") {
            throw ConfigError("frontier_x must be welfare or clicks");
        }
    }

    std::vector<OperatingPoint> points = run_sweep(cfg);
    for (const OperatingPoint& p : points) {
        out << point_summary(p);
    }

    OutputSink sink(rc.output_dir);
    sink.write_text("sweep.csv", sweep_csv_content(points));

    std::vector<std::string> order;
    std::map<std::string, std::vector<OperatingPoint>> groups;
    group_by_family(points, &order, &groups);

    if (!do_frontier) {
        for (const std::string& family : order) {
            sink.write_text("plot_" + sanitize_filename(family) + ".dat",
                            plot_content(sweep_plot_rows(groups[family])));
        }
    } else {
        std::vector<OperatingPoint> frontier_points;
        for (const std::string& family : order) {
            std::vector<OperatingPoint> front = frontier(groups[family], fx);
            out << "family=" << family << " frontier_points=" << front.size() << '\n';
            std::vector<PlotRow> rows;
            rows.reserve(front.size());
            for (const OperatingPoint& p : front) {
                double x = fx == FrontierX::Welfare ? p.welfare : p.clicks;
                rows.push_back({x, p.revenue, p.revenue_se});
            }
            sink.write_text("plot_" + sanitize_filename(family) + ".dat",
                            plot_content(rows));
            frontier_points.insert(frontier_points.end(), front.begin(), front.end());
        }
        sink.write_text("frontier.csv", sweep_csv_content(frontier_points));
    }

    json meta;
    meta["command"] = do_frontier ? "frontier" : "sweep";
    meta["config_hash"] = config_hash;
    meta["seed"] = cfg.seed;
    meta["trials"] = cfg.trials;
    meta["version"] = kGspLabVersion;
    sink.write_manifest(meta);
}

void cmd_dominance(const json& root, const RunConfig& rc,
                   const std::string& config_hash, std::ostream& out) {
    struct Parsed {
        PopulationModel population;
        int bidders;
        SlotCurve slots;
        std::vector<double> r_grid;
        long trials;
        std::uint64_t seed;
    };
    Parsed parsed = config_phase([&] {
        Parsed p{parse_population(require(root, "population")),
                 root.value("bidders", 8),
                 parse_slots(require(root, "slots")),
                 parse_grid(require(root, "r_grid")),
                 root.value("trials", static_cast<long>(10000)),
                 root.value("seed", static_cast<std::uint64_t>(1))};
        return p;
    });
    if (rc.seed_override) parsed.seed = *rc.seed_override;
    if (rc.trials_override) parsed.trials = *rc.trials_override;

    std::vector<DominanceResult> results;
    results.reserve(parsed.r_grid.size());
    for (double r : parsed.r_grid) {
        DominanceResult res = dominance_experiment(parsed.population, parsed.slots,
                                                   parsed.bidders, r, parsed.trials,
                                                   parsed.seed);
        out << "r=" << fmt6(res.r) << " proposed=" << fmt6(res.proposed_revenue)
            << " (se " << fmt6(res.proposed_revenue_se) << ")"
            << " bound=" << fmt6(res.bound_revenue) << " (se "
            << fmt6(res.bound_revenue_se) << ")"
            << " surplus_gap=" << fmt6(res.surplus_gap) << " (se "
            << fmt6(res.surplus_gap_se) << ")"
            << " condition=" << (res.condition_holds ? "yes" : "no") << '\n';
        results.push_back(res);
    }

    std::string csv =
        "r,proposed_revenue,proposed_revenue_se,bound_revenue,bound_revenue_se,"
        "surplus_gap,surplus_gap_se,revenue_gap,revenue_gap_se,condition_holds,"
        "trials\n";
    std::vector<PlotRow> proposed_rows, bound_rows, surplus_rows, revenue_rows;
    for (const DominanceResult& res : results) {
        csv += format_csv_value(res.r);
        for (double v : {res.proposed_revenue, res.proposed_revenue_se,
                         res.bound_revenue, res.bound_revenue_se, res.surplus_gap,
                         res.surplus_gap_se, res.revenue_gap, res.revenue_gap_se}) {
            csv += ',';
            csv += format_csv_value(v);
        }
        csv += ',';
        csv += res.condition_holds ? '1' : '0';
        csv += ',';
        csv += std::to_string(res.trials);
        csv += '\n';
        proposed_rows.push_back({res.r, res.proposed_revenue, res.proposed_revenue_se});
        bound_rows.push_back({res.r, res.bound_revenue, res.bound_revenue_se});
        surplus_rows.push_back({res.r, res.surplus_gap, res.surplus_gap_se});
        revenue_rows.push_back({res.r, res.revenue_gap, res.revenue_gap_se});
    }

    OutputSink sink(rc.output_dir);
    sink.write_text("dominance.csv", csv);
    sink.write_text("plot_proposed.dat", plot_content(proposed_rows));
    sink.write_text("plot_bound.dat", plot_content(bound_rows));
    sink.write_text("plot_surplus_gap.dat", plot_content(surplus_rows));
    sink.write_text("plot_revenue_gap.dat", plot_content(revenue_rows));

    json meta;
    meta["command"] = "dominance";
    meta["config_hash"] = config_hash;
    meta["seed"] = parsed.seed;
    meta["trials"] = parsed.trials;
    meta["version"] = kGspLabVersion;
    sink.write_manifest(meta);
}

LogSpec parse_log_spec(const json& j) {
    std::string market = require(j, "market").get<std::string>();
    LogSpec spec;
    if (market == "thick") {
        spec = LogSpec::thick();
    } else if (market == "thin") {
        spec = LogSpec::thin();
    } else {
        throw ConfigError("market must be thick or thin");
    }
    if (j.contains("auctions")) spec.auctions = j.at("auctions").get<long>();
    if (j.contains("bidders")) spec.bidders = j.at("bidders").get<int>();
    if (j.contains("bid_lower")) spec.bid_lower = j.at("bid_lower").get<double>();
    if (j.contains("bid_upper")) spec.bid_upper = j.at("bid_upper").get<double>();
    if (j.contains("seed")) spec.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("atoms")) {
        spec.atoms.clear();
        for (const json& atom : j.at("atoms")) {
            spec.atoms.push_back(
                {require(atom, "bid").get<double>(), require(atom, "mass").get<double>()});
        }
    }
    if (j.contains("relevances")) spec.relevance_dist = parse_dist(j.at("relevances"));
    if (j.contains("slots")) spec.slots = parse_slots(j.at("slots"));
    spec.validate();
    return spec;
}

ReplayRule parse_rule_name(std::string name) {
    ReplayRule rule;
    const std::string suffix = "_filter";
    if (name.size() > suffix.size() &&
        name.compare(name.size() - suffix.size(), suffix.size(), suffix) == 0) {
        rule.bid_filter = true;
        name.resize(name.size() - suffix.size());
    }
    if (name == "by_bid") {
        rule.family = RankFamily::ByBid;
    } else if (name == "standard") {
        rule.family = RankFamily::Standard;
    } else if (name == "squashed") {
        rule.family = RankFamily::Squashed;
    } else if (name == "proposed") {
        rule.family = RankFamily::Proposed;
    } else {
        throw ConfigError("unknown replay family: " + name);
    }
    return rule;
}

std::vector<ReplayRule> parse_replay_rules(const json& j) {
    if (!j.is_array() || j.empty()) {
        throw ConfigError("rules must be a non-empty array");
    }
    std::vector<ReplayRule> rules;
    for (const json& entry : j) {
        ReplayRule rule;
        if (entry.is_string()) {
            rule = parse_rule_name(entry.get<std::string>());
        } else {
            rule = parse_rule_name(require(entry, "family").get<std::string>());
            if (entry.contains("filter")) rule.bid_filter = entry.at("filter").get<bool>();
            if (entry.contains("alpha")) rule.alpha = entry.at("alpha").get<double>();
        }
        rule.validate();
        rules.push_back(rule);
    }
    return rules;
}

void cmd_replay(const json& root, const RunConfig& rc, const std::string& config_hash,
                std::ostream& out) {
    struct Parsed {
        std::vector<ReplayRule> rules;
        std::vector<double> r_grid;
        ReplayOptions options;
        bool generated = false;
        LogSpec log_spec;
        std::string log_file;
        bool write_log = false;
    };
    Parsed parsed = config_phase([&] {
        Parsed p;
        p.rules = parse_replay_rules(require(root, "rules"));
        p.r_grid = parse_grid(require(root, "r_grid"));
        p.options.min_bid = root.value("min_bid", 0.0);
        p.options.slot_decay = root.value("slot_decay", 0.5);
        if (root.contains("log_file")) {
            p.log_file = root.at("log_file").get<std::string>();
        } else {
            p.log_spec = parse_log_spec(require(root, "log"));
            p.generated = true;
            p.write_log = root.value("write_log", false);
        }
        return p;
    });
    if (parsed.generated && rc.seed_override) {
        parsed.log_spec.seed = *rc.seed_override;
    }

    std::vector<LogRecord> records;
    long read_rejected = 0;
    if (parsed.generated) {
        records = generate_log(parsed.log_spec);
    } else {
        LogReadResult read = read_log_csv(parsed.log_file);
        records = std::move(read.records);
        read_rejected = read.rejected;
    }
    GroupedLog grouped = group_log(records);
    out << "auctions=" << grouped.auctions.size() << " records=" << records.size()
        << " rejected=" << (read_rejected + grouped.rejected) << '\n';

    std::vector<ReplayRow> rows =
        replay_sweep(grouped, parsed.rules, parsed.r_grid, parsed.options);
    for (const ReplayRow& row : rows) {
        out << "spec=" << row.spec << " r=" << fmt6(row.r)
            << " revenue=" << fmt6(row.revenue) << " clicks=" << fmt6(row.click_yield)
            << '\n';
    }
    std::vector<SmoothnessRow> smooth = smoothness_report(rows);
    for (const SmoothnessRow& s : smooth) {
        out << "spec=" << s.spec << " jaggedness=" << fmt6(s.jaggedness) << '\n';
    }

    std::string csv = "spec,param_r,param_alpha,param_rho,revenue,click_yield,auctions\n";
    for (const ReplayRow& row : rows) {
        csv += row.spec;
        for (double v : {row.r, row.alpha, row.rho, row.revenue, row.click_yield}) {
            csv += ',';
            csv += format_csv_value(v);
        }
        csv += ',';
        csv += std::to_string(row.auctions);
        csv += '\n';
    }
    std::string smooth_csv = "spec,total_variation,net_change,jaggedness\n";
    for (const SmoothnessRow& s : smooth) {
        smooth_csv += s.spec;
        for (double v : {s.total_variation, s.net_change, s.jaggedness}) {
            smooth_csv += ',';
            smooth_csv += format_csv_value(v);
        }
        smooth_csv += '\n';
    }

    OutputSink sink(rc.output_dir);
    sink.write_text("replay.csv", csv);
    sink.write_text("smoothness.csv", smooth_csv);
    std::vector<std::string> order;
    std::map<std::string, std::vector<PlotRow>> by_spec;
    for (const ReplayRow& row : rows) {
        if (!by_spec.count(row.spec)) {
            order.push_back(row.spec);
        }
        by_spec[row.spec].push_back({row.r, row.revenue, 0.0});
    }
    for (const std::string& spec : order) {
        sink.write_text("plot_" + sanitize_filename(spec) + ".dat",
                        plot_content(by_spec[spec]));
    }
    if (parsed.generated && parsed.write_log) {
        std::ostringstream log_out;
        write_log_csv(log_out, records);
        sink.write_text("log.csv", log_out.str());
    }

    json meta;
    meta["command"] = "replay";
    meta["config_hash"] = config_hash;
    if (parsed.generated) {
        meta["seed"] = parsed.log_spec.seed;
    }
    meta["version"] = kGspLabVersion;
    sink.write_manifest(meta);
}

Realisation parse_instance(const json& j) {
    Realisation real;
    real.slots = parse_slots(require(j, "slots"));
    const json& bidders = require(j, "bidders");
    if (!bidders.is_array() || bidders.empty()) {
        throw ConfigError("instance needs a non-empty bidders array");
    }
    int id = 0;
    for (const json& b : bidders) {
        Bidder bidder;
        bidder.value = require(b, "value").get<double>();
        bidder.relevance = require(b, "relevance").get<double>();
        bidder.id = id++;
        real.bidders.push_back(bidder);
    }
    return real;
}

RankingSpec parse_single_spec(const json& j) {
    std::string family = require(j, "family").get<std::string>();
    return make_family_spec(family, j.value("r", 0.0), j.value("alpha", 1.0),
                            j.value("rho", 0.0));
}

void cmd_verify(const json& root, const RunConfig& rc, const std::string& config_hash,
                std::ostream& out) {
    struct Parsed {
        Realisation real;
        bool has_probe = false;
        double probe_r = 0.0;
        bool has_bids = false;
        RankingSpec spec;
        std::string spec_label;
        std::vector<double> bids;
    };
    Parsed parsed = config_phase([&] {
        Parsed p;
        p.real = parse_instance(require(root, "instance"));
        if (root.contains("probe_r")) {
            p.has_probe = true;
            p.probe_r = root.at("probe_r").get<double>();
        }
        if (root.contains("bids")) {
            p.has_bids = true;
            p.bids = root.at("bids").get<std::vector<double>>();
            p.spec = parse_single_spec(require(root, "spec"));
            p.spec_label = require(root, "spec").value("label",
                                                       require(root, "spec")
                                                           .at("family")
                                                           .get<std::string>());
        }
        if (!p.has_probe && !p.has_bids) {
            throw ConfigError("verify needs probe_r or bids");
        }
        return p;
    });

    std::string report;
    if (parsed.has_probe) {
        FeasibilityInterval interval =
            order_preserving_sne_feasible(parsed.real, parsed.probe_r);
        report += "probe r=" + fmt10(parsed.probe_r) + ": ";
        report += interval.feasible ? "feasible" : "infeasible";
        report += " lower=" + fmt10(interval.lower);
        report += " upper=" + fmt10(interval.upper);
        report += '\n';
    }
    if (parsed.has_bids) {
        SneVerdict verdict = verify_sne(parsed.spec, parsed.bids, parsed.real);
        report += "equilibrium check (" + parsed.spec_label + "): ";
        report += verdict.ok ? "ok" : "violated";
        report += '\n';
        for (const SneViolation& v : verdict.violations) {
            report += "  bidder " + std::to_string(v.bidder);
            if (v.target_position == 0) {
                report += " prefers the outside option";
            } else {
                report += " prefers position " + std::to_string(v.target_position);
            }
            report += " slack=" + fmt10(v.slack);
            report += '\n';
        }
    }
    out << report;

    OutputSink sink(rc.output_dir);
    sink.write_text("verify.txt", report);
    json meta;
    meta["command"] = "verify";
    meta["config_hash"] = config_hash;
    meta["version"] = kGspLabVersion;
    sink.write_manifest(meta);
}

void cmd_condcheck(const json& root, const RunConfig& rc,
                   const std::string& config_hash, std::ostream& out) {
    struct Parsed {
        ValueDistribution dist = ValueDistribution::uniform(0.0, 1.0);
        std::vector<double> r_grid;
    };
    Parsed parsed = config_phase([&] {
        Parsed p;
        p.dist = parse_dist(require(root, "values"));
        if (root.contains("r_grid")) {
            p.r_grid = parse_grid(root.at("r_grid"));
        } else if (root.contains("r")) {
            p.r_grid = {root.at("r").get<double>()};
        } else {
            throw ConfigError("condcheck needs r or r_grid");
        }
        return p;
    });

    std::string report = "distribution: " + parsed.dist.describe() + '\n';
    try {
        report += "virtual value root: " + fmt10(reserve_root(parsed.dist)) + '\n';
    } catch (const NoRoot& e) {
        report += std::string("virtual value root: unavailable (") + e.what() + ")\n";
    }
    for (double r : parsed.r_grid) {
        double threshold = maincond_threshold(parsed.dist, r);
        bool holds = r <= threshold + 1e-12;
        report += "r=" + fmt10(r) + ": threshold=" + fmt10(threshold) +
                  " condition_holds=" + (holds ? "yes" : "no") + '\n';
    }
    out << report;

    OutputSink sink(rc.output_dir);
    sink.write_text("condcheck.txt", report);
    json meta;
    meta["command"] = "condcheck";
    meta["config_hash"] = config_hash;
    meta["version"] = kGspLabVersion;
    sink.write_manifest(meta);
}

}  // namespace

std::string format_csv_value(double v) {
    if (std::isnan(v)) {
        return "";
    }
    return fmt17(v);
}

double parse_csv_value(const std::string& field) {
    if (field.empty()) {
        return std::numeric_limits<double>::quiet_NaN();
    }
    double v = 0.0;
    const char* first = field.data();
    const char* last = first + field.size();
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last) {
        throw ConfigError("bad numeric field: " + field);
    }
    return v;
}

std::uint64_t fnv1a64(const std::string& bytes) {
    std::uint64_t hash = 14695981039346656037ull;
    for (unsigned char c : bytes) {
        hash ^= c;
        hash *= 1099511628211ull;
    }
    return hash;
}

void emit_plotdata(const std::vector<PlotRow>& rows, const std::string& path) {
    std::string content = plot_content(rows);
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw ConfigError("cannot write plot data: " + path);
    }
    out << content;
    out.flush();
    if (!out) {
        throw ConfigError("cannot write plot data: " + path);
    }
}

void write_sweep_csv(std::ostream& out, const std::vector<OperatingPoint>& points) {
    out << sweep_csv_content(points);
}

std::vector<OperatingPoint> read_sweep_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || line != kSweepHeader) {
        throw ConfigError("sweep csv header mismatch");
    }
    std::vector<OperatingPoint> points;
    while (std::getline(in, line)) {
        if (line.empty()) {
            continue;
        }
        std::vector<std::string> fields = split_csv_line(line);
        if (fields.size() != 11) {
            throw ConfigError("sweep csv row needs 11 fields");
        }
        OperatingPoint p;
        p.family = fields[0];
        p.r = parse_csv_value(fields[1]);
        p.alpha = parse_csv_value(fields[2]);
        p.rho = parse_csv_value(fields[3]);
        p.revenue = parse_csv_value(fields[4]);
        p.revenue_se = parse_csv_value(fields[5]);
        p.welfare = parse_csv_value(fields[6]);
        p.welfare_se = parse_csv_value(fields[7]);
        p.clicks = parse_csv_value(fields[8]);
        p.clicks_se = parse_csv_value(fields[9]);
        p.trials = std::stol(fields[10]);
        points.push_back(std::move(p));
    }
    return points;
}

ExperimentConfig parse_experiment_config(const std::string& json_text) {
    return config_phase([&] {
        json root;
        try {
            root = json::parse(json_text);
        } catch (const json::exception& e) {
            throw ConfigError(std::string("config parse failure: ") + e.what());
        }
        return parse_experiment_json(root);
    });
}

int run(const RunConfig& config) { return run(config, std::cout, std::cerr); }

int run(const RunConfig& config, std::ostream& out, std::ostream& err) {
    try {
        std::ifstream in(config.config_path, std::ios::binary);
        if (!in) {
            throw ConfigError("cannot open config file: " + config.config_path);
        }
        std::ostringstream buf;
        buf << in.rdbuf();
        std::string raw = buf.str();
        json root;
        try {
            root = json::parse(raw);
        } catch (const json::exception& e) {
            throw ConfigError(std::string("config parse failure: ") + e.what());
        }
        std::string config_hash = hash_hex(raw);

        if (config.command == "sweep") {
            cmd_sweep(root, config, config_hash, out, false);
        } else if (config.command == "frontier") {
            cmd_sweep(root, config, config_hash, out, true);
        } else if (config.command == "dominance") {
            cmd_dominance(root, config, config_hash, out);
        } else if (config.command == "replay") {
            cmd_replay(root, config, config_hash, out);
        } else if (config.command == "verify") {
            cmd_verify(root, config, config_hash, out);
        } else if (config.command == "condcheck") {
            cmd_condcheck(root, config, config_hash, out);
        } else {
            throw ConfigError("unknown command: " + config.command);
        }
        return 0;
    } catch (const ConfigError& e) {
        err << e.what() << '\n';
        return 2;
    } catch (const json::exception& e) {
        err << "config error: " << e.what() << '\n';
        return 2;
    } catch (const GspError& e) {
        err << e.what() << '\n';
        return 3;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 3;
    }
}

}  // namespace gsp
