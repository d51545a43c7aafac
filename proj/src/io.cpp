#include "mindet/io.hpp"

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <limits>
#include <numbers>
#include <ostream>
#include <sstream>
#include <system_error>
#include <utility>

#include "json.hpp"

#include "mindet/charfun.hpp"
#include "mindet/errors.hpp"

namespace mindet {
namespace {

using nlohmann::json;

constexpr double kDistinctnessThreshold = 1e-3;
const std::vector<std::string> kEmitKinds = {"densities", "charfuns",
                                             "moments", "report"};

[[noreturn]] void bad_field(const std::string& field, const std::string& why) {
    throw ConfigInvalid("config field '" + field + "': " + why);
}

double as_num(const json& v, const std::string& field) {
    if (!v.is_number()) bad_field(field, "expected a number");
    return v.get<double>();
}

int as_int(const json& v, const std::string& field) {
    if (!v.is_number_integer()) bad_field(field, "expected an integer");
    return v.get<int>();
}

std::string as_str(const json& v, const std::string& field) {
    if (!v.is_string()) bad_field(field, "expected a string");
    return v.get<std::string>();
}

bool as_bool(const json& v, const std::string& field) {
    if (!v.is_boolean()) bad_field(field, "expected a boolean");
    return v.get<bool>();
}

std::string joined(const std::string& prefix, const std::string& key) {
    return prefix.empty() ? key : prefix + "." + key;
}

void check_object(const json& j, const std::string& prefix,
                  std::initializer_list<const char*> allowed) {
    if (!j.is_object())
        bad_field(prefix.empty() ? "<root>" : prefix, "expected an object");
    for (const auto& item : j.items()) {
        bool known = false;
        for (const char* k : allowed)
            if (item.key() == k) known = true;
        if (!known)
            throw ConfigInvalid("config: unknown field '" +
                                joined(prefix, item.key()) + "'");
    }
}

BumpSpec parse_bump(const json& j, const std::string& prefix,
                    const BumpSpec& defaults) {
    check_object(j, prefix, {"center", "half_width", "kind", "power"});
    BumpSpec spec = defaults;
    if (j.contains("center"))
        spec.center = as_num(j.at("center"), joined(prefix, "center"));
    if (j.contains("half_width"))
        spec.half_width =
            as_num(j.at("half_width"), joined(prefix, "half_width"));
    if (j.contains("kind")) {
        std::string k = as_str(j.at("kind"), joined(prefix, "kind"));
        if (k == "standard")
            spec.kind = BumpKind::standard_bump;
        else if (k == "cosine")
            spec.kind = BumpKind::cosine_power_bump;
        else
            bad_field(joined(prefix, "kind"),
                      "expected \"standard\" or \"cosine\", got \"" + k +
                          "\"");
    }
    if (j.contains("power"))
        spec.power = as_int(j.at("power"), joined(prefix, "power"));
    return spec;
}

Grid parse_grid(const json& j, const std::string& prefix) {
    check_object(j, prefix, {"x_min", "x_max", "n_points"});
    for (const char* k : {"x_min", "x_max", "n_points"})
        if (!j.contains(k)) bad_field(joined(prefix, k), "missing");
    double lo = as_num(j.at("x_min"), joined(prefix, "x_min"));
    double hi = as_num(j.at("x_max"), joined(prefix, "x_max"));
    int n = as_int(j.at("n_points"), joined(prefix, "n_points"));
    if (!std::isfinite(lo) || !std::isfinite(hi) || lo >= hi)
        bad_field(prefix, "needs finite x_min < x_max");
    if (n < 2 || n > (1 << 20))
        bad_field(joined(prefix, "n_points"), "must be in [2, 1048576]");
    return Grid(lo, hi, n);
}

// bumps used when an operator config does not spell out the pair
BumpSpec default_left_bump() {
    return {-1.5, 0.5, BumpKind::cosine_power_bump, 12, cplx(1.0)};
}
BumpSpec default_right_bump() {
    return {1.5, 0.5, BumpKind::cosine_power_bump, 12, cplx(1.0)};
}

std::string fmt_double(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

double parse_double(const std::string& s, const std::string& where) {
    double v{};
    auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size())
        throw IoError(where + ": cannot parse number '" + s + "'");
    return v;
}

std::vector<std::string> split_csv_line(std::string line) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        std::size_t comma = line.find(',', start);
        if (comma == std::string::npos) {
            out.push_back(line.substr(start));
            return out;
        }
        out.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
}

FamilyKind kind_from_string(const std::string& s, const std::string& where) {
    if (s == "stieltjes") return FamilyKind::stieltjes;
    if (s == "operator") return FamilyKind::operator_flow;
    throw ConfigInvalid(where + ": expected \"stieltjes\" or \"operator\", "
                                "got \"" +
                        s + "\"");
}

json report_to_json(const std::string& name, const VerificationReport& rep,
                    const Grid& r_grid) {
    json j;
    j["schema"] = 1;
    j["name"] = name;
    j["family_kind"] = to_string(rep.family_kind);
    j["n_max"] = rep.n_max;
    j["params"] = rep.params;
    j["r_grid"] = {{"x_min", r_grid.x_min},
                   {"x_max", r_grid.x_max},
                   {"n_points", r_grid.n_points}};
    json table = json::array();
    for (const MomentVector& m : rep.moment_table) table.push_back(m.values);
    j["moment_table"] = std::move(table);
    j["max_moment_spread"] = rep.max_moment_spread;
    j["spread_tolerance"] = rep.spread_tolerance;
    if (std::isinf(rep.min_pairwise_l1))
        j["min_pairwise_l1"] = nullptr;
    else
        j["min_pairwise_l1"] = rep.min_pairwise_l1;
    j["distinctness_threshold"] = rep.distinctness_threshold;
    j["normalization_errors"] = rep.normalization_errors;
    j["negativity_worst"] = rep.negativity_worst;
    json checks = json::array();
    for (const ConditionCheck& c : rep.condition_checks)
        checks.push_back(
            {{"name", c.name}, {"pass", c.pass}, {"value", c.value}});
    j["condition_checks"] = std::move(checks);
    j["verdict"] = to_string(rep.verdict);
    j["fail_reason"] = to_string(rep.fail_reason);
    j["fail_detail"] = rep.fail_detail;
    return j;
}

bool wants(const ExperimentConfig& cfg, const std::string& artifact) {
    for (const std::string& e : cfg.emit)
        if (e == artifact) return true;
    return false;
}

} // namespace

ExperimentConfig parse_config_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const std::exception& e) {
        throw ConfigInvalid(std::string("config is not valid JSON: ") +
                            e.what());
    }
    if (!j.is_object()) throw ConfigInvalid("config root must be an object");
    if (!j.contains("kind")) bad_field("kind", "missing");

    ExperimentConfig cfg;
    cfg.kind = kind_from_string(as_str(j.at("kind"), "kind"),
                                "config field 'kind'");

    const bool stl = cfg.kind == FamilyKind::stieltjes;
    if (stl)
        check_object(j, "",
                     {"schema", "name", "kind", "grid", "n_max", "output_dir",
                      "emit", "generator", "lambda", "phi", "epsilons",
                      "enforce_extent_condition"});
    else
        check_object(j, "",
                     {"schema", "name", "kind", "grid", "n_max", "output_dir",
                      "emit", "pair", "operator", "betas"});

    if (j.contains("schema") && as_int(j.at("schema"), "schema") != 1)
        bad_field("schema", "only schema 1 is supported");
    cfg.name = j.contains("name") ? as_str(j.at("name"), "name")
                                  : std::string(to_string(cfg.kind));
    if (!j.contains("grid")) bad_field("grid", "missing");
    cfg.x_grid = parse_grid(j.at("grid"), "grid");
    if (j.contains("n_max")) cfg.n_max = as_int(j.at("n_max"), "n_max");
    if (j.contains("output_dir"))
        cfg.output_dir = as_str(j.at("output_dir"), "output_dir");
    if (j.contains("emit")) {
        const json& e = j.at("emit");
        if (!e.is_array()) bad_field("emit", "expected an array of strings");
        cfg.emit.clear();
        for (std::size_t i = 0; i < e.size(); ++i)
            cfg.emit.push_back(
                as_str(e[i], "emit[" + std::to_string(i) + "]"));
    }

    if (stl) {
        if (j.contains("generator"))
            cfg.stieltjes.generator =
                parse_bump(j.at("generator"), "generator", BumpSpec{});
        if (j.contains("lambda"))
            cfg.stieltjes.lambda = as_num(j.at("lambda"), "lambda");
        if (j.contains("phi")) cfg.stieltjes.phi = as_num(j.at("phi"), "phi");
        if (j.contains("epsilons")) {
            const json& e = j.at("epsilons");
            if (!e.is_array())
                bad_field("epsilons", "expected an array of numbers");
            cfg.stieltjes.epsilons.clear();
            for (std::size_t i = 0; i < e.size(); ++i)
                cfg.stieltjes.epsilons.push_back(
                    as_num(e[i], "epsilons[" + std::to_string(i) + "]"));
        }
        if (j.contains("enforce_extent_condition"))
            cfg.stieltjes.enforce_extent_condition = as_bool(
                j.at("enforce_extent_condition"), "enforce_extent_condition");
    } else {
        cfg.operator_family.pair.left = default_left_bump();
        cfg.operator_family.pair.right = default_right_bump();
        if (j.contains("pair")) {
            const json& p = j.at("pair");
            check_object(p, "pair", {"left", "right", "norm_split"});
            if (p.contains("left"))
                cfg.operator_family.pair.left = parse_bump(
                    p.at("left"), "pair.left", default_left_bump());
            if (p.contains("right"))
                cfg.operator_family.pair.right = parse_bump(
                    p.at("right"), "pair.right", default_right_bump());
            if (p.contains("norm_split"))
                cfg.operator_family.pair.norm_split =
                    as_num(p.at("norm_split"), "pair.norm_split");
        }
        if (j.contains("operator")) {
            const json& o = j.at("operator");
            check_object(o, "operator", {"kind", "c", "power"});
            if (o.contains("kind")) {
                std::string k = as_str(o.at("kind"), "operator.kind");
                if (k == "translation")
                    cfg.operator_family.op.kind = OperatorKind::translation;
                else if (k == "gauged")
                    cfg.operator_family.op.kind =
                        OperatorKind::gauged_translation;
                else
                    bad_field("operator.kind",
                              "expected \"translation\" or \"gauged\", got "
                              "\"" +
                                  k + "\"");
            }
            if (o.contains("c"))
                cfg.operator_family.op.c = as_num(o.at("c"), "operator.c");
            if (o.contains("power"))
                cfg.operator_family.op.power =
                    as_int(o.at("power"), "operator.power");
        }
        if (j.contains("betas")) {
            const json& b = j.at("betas");
            if (!b.is_array())
                bad_field("betas", "expected an array of numbers");
            cfg.operator_family.betas.clear();
            for (std::size_t i = 0; i < b.size(); ++i)
                cfg.operator_family.betas.push_back(
                    as_num(b[i], "betas[" + std::to_string(i) + "]"));
        }
    }

    validate_config(cfg);
    return cfg;
}

ExperimentConfig load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str());
}

void validate_config(const ExperimentConfig& cfg) {
    if (cfg.name.empty()) bad_field("name", "must not be empty");
    if (cfg.n_max < 0 || cfg.n_max > 12)
        bad_field("n_max", "must be in [0, 12]");
    for (const std::string& e : cfg.emit) {
        bool ok = false;
        for (const std::string& k : kEmitKinds)
            if (e == k) ok = true;
        if (!ok)
            bad_field("emit", "unknown artifact \"" + e +
                                  "\" (choose from densities, charfuns, "
                                  "moments, report)");
    }
    for (std::size_t a = 0; a < cfg.emit.size(); ++a)
        for (std::size_t b = a + 1; b < cfg.emit.size(); ++b)
            if (cfg.emit[a] == cfg.emit[b])
                bad_field("emit", "duplicate artifact \"" + cfg.emit[a] +
                                      "\"");

    auto check_bump = [](const BumpSpec& b, const std::string& prefix) {
        if (!std::isfinite(b.center))
            bad_field(prefix + ".center", "must be finite");
        if (!std::isfinite(b.half_width) || b.half_width <= 0.0)
            bad_field(prefix + ".half_width", "must be positive");
        if (b.kind == BumpKind::cosine_power_bump && b.power < 4)
            bad_field(prefix + ".power", "must be at least 4");
    };

    if (cfg.kind == FamilyKind::stieltjes) {
        const StieltjesFamilySpec& s = cfg.stieltjes;
        check_bump(s.generator, "generator");
        if (!std::isfinite(s.lambda) || s.lambda <= 0.0)
            bad_field("lambda", "must be a positive frequency");
        if (!std::isfinite(s.phi) || std::abs(s.phi) > std::numbers::pi)
            bad_field("phi", "must lie in [-pi, pi]");
        if (s.epsilons.empty())
            bad_field("epsilons", "must name at least one member");
        for (std::size_t i = 0; i < s.epsilons.size(); ++i)
            if (!std::isfinite(s.epsilons[i]) ||
                std::abs(s.epsilons[i]) > 1.0)
                bad_field("epsilons[" + std::to_string(i) + "]",
                          "amplitude must satisfy |epsilon| <= 1");
    } else {
        const OperatorFamilySpec& o = cfg.operator_family;
        check_bump(o.pair.left, "pair.left");
        check_bump(o.pair.right, "pair.right");
        if (!std::isfinite(o.pair.norm_split) || o.pair.norm_split <= 0.0 ||
            o.pair.norm_split >= 1.0)
            bad_field("pair.norm_split", "must lie strictly inside (0, 1)");
        if (!std::isfinite(o.op.c)) bad_field("operator.c", "must be finite");
        if (o.op.power < 1) bad_field("operator.power", "must be at least 1");
        if (o.betas.empty())
            bad_field("betas", "must name at least one member");
        for (std::size_t i = 0; i < o.betas.size(); ++i)
            if (!std::isfinite(o.betas[i]))
                bad_field("betas[" + std::to_string(i) + "]",
                          "must be finite");
    }
}

ExperimentConfig stieltjes_config_from_flags(double half_width, double lambda,
                                             double phi,
                                             std::vector<double> epsilons,
                                             int n_max,
                                             const std::string& out_dir) {
    ExperimentConfig cfg;
    cfg.name = "stieltjes";
    cfg.kind = FamilyKind::stieltjes;
    cfg.x_grid = Grid::centered(4.0, 4096);
    cfg.n_max = n_max;
    cfg.stieltjes.generator =
        BumpSpec{0.0, half_width, BumpKind::standard_bump, 12, cplx(1.0)};
    cfg.stieltjes.lambda = lambda;
    cfg.stieltjes.phi = phi;
    cfg.stieltjes.epsilons = std::move(epsilons);
    cfg.output_dir = out_dir;
    validate_config(cfg);
    return cfg;
}

ExperimentConfig operator_config_from_flags(const std::string& op_kind,
                                            double c, int power, double gap,
                                            std::vector<double> betas,
                                            const std::string& out_dir) {
    ExperimentConfig cfg;
    cfg.name = "operator";
    cfg.kind = FamilyKind::operator_flow;
    cfg.x_grid = Grid::centered(8.0, 4096);
    cfg.operator_family.pair.left = default_left_bump();
    cfg.operator_family.pair.right = default_right_bump();
    if (!std::isfinite(gap) || gap <= 1.0)
        bad_field("gap", "bump supports of half width 0.5 need a center "
                         "distance above 1");
    cfg.operator_family.pair.left.center = -gap / 2.0;
    cfg.operator_family.pair.right.center = gap / 2.0;
    if (op_kind == "translation")
        cfg.operator_family.op.kind = OperatorKind::translation;
    else if (op_kind == "gauged")
        cfg.operator_family.op.kind = OperatorKind::gauged_translation;
    else
        bad_field("operator", "expected \"translation\" or \"gauged\", got "
                              "\"" +
                                  op_kind + "\"");
    cfg.operator_family.op.c = c;
    cfg.operator_family.op.power = power;
    if (!betas.empty()) cfg.operator_family.betas = std::move(betas);
    else
        cfg.operator_family.betas = {0.0, std::numbers::pi / 2.0,
                                     std::numbers::pi,
                                     3.0 * std::numbers::pi / 2.0};
    cfg.output_dir = out_dir;
    validate_config(cfg);
    return cfg;
}

void write_density_csv(const std::string& path,
                       const std::vector<double>& params,
                       const std::vector<DensityFunction>& members) {
    if (members.empty() || members.size() != params.size())
        throw Error("write_density_csv: params and members must pair up");
    for (const DensityFunction& m : members)
        require_same_grid(members[0].grid, m.grid, "write_density_csv");
    std::ofstream out(path);
    if (!out) throw IoError("cannot write '" + path + "'");
    out << "r";
    for (double p : params) out << ",param=" << fmt_double(p);
    out << '\n';
    const Grid& g = members[0].grid;
    for (int j = 0; j < g.n_points; ++j) {
        out << fmt_double(g.point(j));
        for (const DensityFunction& m : members)
            out << ',' << fmt_double(m.values[j]);
        out << '\n';
    }
    if (!out) throw IoError("write failed for '" + path + "'");
}

void write_charfun_csv(const std::string& path,
                       const std::vector<double>& params,
                       const std::vector<CharFn>& charfuns) {
    if (charfuns.empty() || charfuns.size() != params.size())
        throw Error("write_charfun_csv: params and charfuns must pair up");
    for (const CharFn& m : charfuns)
        require_same_grid(charfuns[0].grid, m.grid, "write_charfun_csv");
    std::ofstream out(path);
    if (!out) throw IoError("cannot write '" + path + "'");
    out << "theta";
    for (double p : params)
        out << ",param=" << fmt_double(p) << ":re,param=" << fmt_double(p)
            << ":im";
    out << '\n';
    const Grid& g = charfuns[0].grid;
    for (int j = 0; j < g.n_points; ++j) {
        out << fmt_double(g.point(j));
        for (const CharFn& m : charfuns)
            out << ',' << fmt_double(m.values[j].real()) << ','
                << fmt_double(m.values[j].imag());
        out << '\n';
    }
    if (!out) throw IoError("write failed for '" + path + "'");
}

void write_moments_csv(const std::string& path,
                       const std::vector<double>& params,
                       const std::vector<MomentVector>& table) {
    if (table.empty() || table.size() != params.size())
        throw Error("write_moments_csv: params and table must pair up");
    for (const MomentVector& m : table)
        if (m.values.size() != table[0].values.size())
            throw Error("write_moments_csv: ragged moment table");
    std::ofstream out(path);
    if (!out) throw IoError("cannot write '" + path + "'");
    out << "n";
    for (double p : params) out << ",param=" << fmt_double(p);
    out << '\n';
    for (std::size_t n = 0; n < table[0].values.size(); ++n) {
        out << n;
        for (const MomentVector& m : table)
            out << ',' << fmt_double(m.values[n]);
        out << '\n';
    }
    if (!out) throw IoError("write failed for '" + path + "'");
}

void write_report_json(const std::string& path, const std::string& name,
                       const VerificationReport& report, const Grid& r_grid) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write '" + path + "'");
    out << report_to_json(name, report, r_grid).dump(2) << '\n';
    if (!out) throw IoError("write failed for '" + path + "'");
}

StoredReport read_report_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open report '" + path + "'");
    json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw IoError("report '" + path + "' is not valid JSON: " + e.what());
    }
    try {
        if (!j.is_object() || !j.contains("schema") ||
            !j.at("schema").is_number_integer() ||
            j.at("schema").get<int>() != 1)
            throw IoError("report '" + path + "': unsupported schema");
        StoredReport sr;
        sr.name = j.at("name").get<std::string>();
        const json& g = j.at("r_grid");
        sr.r_grid = Grid(g.at("x_min").get<double>(),
                         g.at("x_max").get<double>(),
                         g.at("n_points").get<int>());
        VerificationReport& rep = sr.report;
        std::string kind = j.at("family_kind").get<std::string>();
        if (kind == "stieltjes")
            rep.family_kind = FamilyKind::stieltjes;
        else if (kind == "operator")
            rep.family_kind = FamilyKind::operator_flow;
        else
            throw IoError("report '" + path + "': unknown family_kind '" +
                          kind + "'");
        rep.n_max = j.at("n_max").get<int>();
        rep.params = j.at("params").get<std::vector<double>>();
        for (const json& row : j.at("moment_table")) {
            MomentVector m;
            m.values = row.get<std::vector<double>>();
            m.n_max = (int)m.values.size() - 1;
            if (m.values.size() >= 3)
                m.sigma_ref = std::sqrt(std::max(
                    0.0, m.values[2] - m.values[1] * m.values[1]));
            rep.moment_table.push_back(std::move(m));
        }
        rep.max_moment_spread =
            j.at("max_moment_spread").get<std::vector<double>>();
        rep.spread_tolerance =
            j.at("spread_tolerance").get<std::vector<double>>();
        rep.min_pairwise_l1 =
            j.at("min_pairwise_l1").is_null()
                ? std::numeric_limits<double>::infinity()
                : j.at("min_pairwise_l1").get<double>();
        rep.distinctness_threshold =
            j.at("distinctness_threshold").get<double>();
        rep.normalization_errors =
            j.at("normalization_errors").get<std::vector<double>>();
        rep.negativity_worst =
            j.at("negativity_worst").get<std::vector<double>>();
        for (const json& c : j.at("condition_checks"))
            rep.condition_checks.push_back(
                ConditionCheck{c.at("name").get<std::string>(),
                               c.at("pass").get<bool>(),
                               c.at("value").get<double>()});
        std::string verdict = j.at("verdict").get<std::string>();
        if (verdict == to_string(Verdict::m_indeterminate_confirmed))
            rep.verdict = Verdict::m_indeterminate_confirmed;
        else if (verdict == to_string(Verdict::failed))
            rep.verdict = Verdict::failed;
        else
            throw IoError("report '" + path + "': unknown verdict '" +
                          verdict + "'");
        std::string reason = j.at("fail_reason").get<std::string>();
        bool matched = false;
        for (FailReason r :
             {FailReason::none, FailReason::moment_spread,
              FailReason::distinctness, FailReason::negativity,
              FailReason::normalization, FailReason::condition_check})
            if (reason == to_string(r)) {
                rep.fail_reason = r;
                matched = true;
            }
        if (!matched)
            throw IoError("report '" + path + "': unknown fail_reason '" +
                          reason + "'");
        rep.fail_detail = j.at("fail_detail").get<std::string>();
        return sr;
    } catch (const json::exception& e) {
        throw IoError("report '" + path + "' is malformed: " + e.what());
    }
}

StoredDensities read_density_csv(const std::string& path,
                                 const Grid& r_grid) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path + "'");
    std::string line;
    if (!std::getline(in, line))
        throw IoError("'" + path + "': missing header row");
    std::vector<std::string> head = split_csv_line(std::move(line));
    if (head.size() < 2 || head[0] != "r")
        throw IoError("'" + path +
                      "': header must be r followed by param= columns");
    StoredDensities out;
    const std::size_t n_members = head.size() - 1;
    for (std::size_t i = 1; i < head.size(); ++i) {
        if (head[i].rfind("param=", 0) != 0)
            throw IoError("'" + path + "': bad member column '" + head[i] +
                          "'");
        out.params.push_back(
            parse_double(head[i].substr(6), "'" + path + "' header"));
    }
    std::vector<std::vector<double>> columns(n_members);
    for (auto& c : columns) c.reserve(r_grid.n_points);
    for (int j = 0; j < r_grid.n_points; ++j) {
        if (!std::getline(in, line))
            throw IoError("'" + path + "': expected " +
                          std::to_string(r_grid.n_points) + " sample rows");
        std::vector<std::string> tok = split_csv_line(std::move(line));
        if (tok.size() != head.size())
            throw IoError("'" + path + "' row " + std::to_string(j + 2) +
                          ": expected " + std::to_string(head.size()) +
                          " columns");
        std::string where = "'" + path + "' row " + std::to_string(j + 2);
        double r = parse_double(tok[0], where);
        double want = r_grid.point(j);
        if (std::abs(r - want) >
            1e-9 * std::max(1.0, std::abs(want)))
            throw IoError(where + ": axis sample " + tok[0] +
                          " does not match the stored grid");
        for (std::size_t i = 0; i < n_members; ++i)
            columns[i].push_back(parse_double(tok[i + 1], where));
    }
    while (std::getline(in, line))
        if (!line.empty() && line != "\r")
            throw IoError("'" + path + "': trailing rows beyond the grid");
    for (std::size_t i = 0; i < n_members; ++i)
        out.members.push_back(
            DensityFunction::measured(r_grid, std::move(columns[i])));
    return out;
}

RunResult run_experiment(const ExperimentConfig& cfg) {
    validate_config(cfg);
    namespace fs = std::filesystem;
    const std::string dir =
        cfg.output_dir.empty() ? "out/" + cfg.name : cfg.output_dir;
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec)
        throw IoError("cannot create output directory '" + dir +
                      "': " + ec.message());

    std::vector<double> params;
    std::vector<DensityFunction> densities;
    std::vector<CharFn> charfuns;
    std::vector<ConditionCheck> checks;

    if (cfg.kind == FamilyKind::stieltjes) {
        StieltjesFamilySpec spec = cfg.stieltjes;
        spec.n_max = cfg.n_max;
        StieltjesFamily fam = build_stieltjes_family(spec, cfg.x_grid);
        params = fam.epsilons;
        densities = fam.members;
        checks = fam.condition_checks;
        if (wants(cfg, "charfuns"))
            for (const DensityFunction& m : fam.members)
                charfuns.push_back(charfun_from_density(m, fam.charfun.grid));
    } else {
        OperatorFamilySpec spec = cfg.operator_family;
        spec.x_grid = cfg.x_grid;
        spec.n_max = cfg.n_max;
        OperatorFamily fam = build_operator_family(spec);
        for (OperatorFamilyMember& m : fam.members) {
            params.push_back(m.beta);
            densities.push_back(std::move(m.density));
            charfuns.push_back(std::move(m.charfun));
        }
        checks = std::move(fam.condition_checks);
    }

    std::vector<std::pair<double, DensityFunction>> rows;
    for (std::size_t i = 0; i < params.size(); ++i)
        rows.emplace_back(params[i], densities[i]);
    RunResult result;
    result.report = verify_family(cfg.kind, rows, cfg.n_max,
                                  kDistinctnessThreshold, checks);

    for (const std::string& artifact : kEmitKinds) {
        if (!wants(cfg, artifact)) continue;
        std::string path;
        if (artifact == "densities") {
            path = (fs::path(dir) / "density.csv").string();
            write_density_csv(path, params, densities);
        } else if (artifact == "charfuns") {
            path = (fs::path(dir) / "charfun.csv").string();
            write_charfun_csv(path, params, charfuns);
        } else if (artifact == "moments") {
            path = (fs::path(dir) / "moments.csv").string();
            write_moments_csv(path, params, result.report.moment_table);
        } else {
            path = (fs::path(dir) / "report.json").string();
            write_report_json(path, cfg.name, result.report,
                              densities[0].grid);
        }
        result.written.push_back(path);
    }

    result.exit_code =
        result.report.verdict == Verdict::m_indeterminate_confirmed ? 0 : 2;
    return result;
}

int verify_directory(const std::string& dir, std::ostream& out) {
    namespace fs = std::filesystem;
    StoredReport stored =
        read_report_json((fs::path(dir) / "report.json").string());
    StoredDensities dens = read_density_csv(
        (fs::path(dir) / "density.csv").string(), stored.r_grid);
    std::vector<std::pair<double, DensityFunction>> rows;
    for (std::size_t i = 0; i < dens.params.size(); ++i)
        rows.emplace_back(dens.params[i], dens.members[i]);
    VerificationReport fresh = verify_family(
        stored.report.family_kind, rows, stored.report.n_max,
        stored.report.distinctness_threshold, stored.report.condition_checks);
    out << report_to_json(stored.name, fresh, stored.r_grid).dump(2) << '\n';
    return fresh.verdict == Verdict::m_indeterminate_confirmed ? 0 : 2;
}

} // namespace mindet
