// Batch front-end: enumerate tables, compute complexities, run audits,
// exercise the code machinery and simulate programs. Every output embeds the
// digest of the resolved configuration so runs are reproducible artifacts.
//
// Exit status: 0 success, 1 audit failure, 2 usage/config error.

#include "qk/audits.hpp"
#include "qk/codes.hpp"
#include "qk/enumerate.hpp"
#include "qk/kolmogorov.hpp"
#include "qk/machine.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <variant>

namespace {

using nlohmann::ordered_json;

struct RunConfig {
    int machine_w = 0;  // 0: default n+2
    std::string mode = "cond-n";
    int n = 1;
    std::optional<int> m;
    std::string aux;
    int max_len = 8;
    long long fuel = -1;
    double epsilon = 0.25;
    double alpha = 0.01;
    long long trials = 0;
    uint64_t seed = 1;
    int workers = 1;
    std::string out;
    std::string table;
    std::string table2;
    std::string state;
    bool exact = false;

    qk::MachineSpec spec() const {
        qk::MachineSpec s{machine_w > 0 ? machine_w : n + 2, qk::mode_from_name(mode)};
        s.validate();
        return s;
    }

    qk::ConditionSpec cond() const {
        qk::ConditionSpec c{n, m, qk::BitString::from_string(aux)};
        c.validate(spec());
        return c;
    }

    // Semantic configuration only: execution knobs (worker count, paths) do
    // not change what is computed and stay out of the digest.
    ordered_json to_json() const {
        ordered_json j;
        j["machine"] = {{"W", machine_w > 0 ? machine_w : n + 2}, {"mode", mode}};
        j["cond"] = {{"n", n}, {"m", m ? ordered_json(*m) : ordered_json(nullptr)}, {"aux", aux}};
        j["max_len"] = max_len;
        j["fuel"] = fuel;
        j["mc"] = {{"epsilon", epsilon}, {"alpha", alpha}, {"trials", trials}, {"seed", seed}};
        return j;
    }

    std::string digest() const { return qk::digest_hex(qk::fnv1a64(to_json().dump())); }
};

void add_common_flags(CLI::App* cmd, RunConfig& cfg) {
    cmd->add_option("--machine-W", cfg.machine_w, "workspace qubit count (default n+2)");
    cmd->add_option("--mode", cfg.mode, "machine mode: cond-n or uncond")
        ->check(CLI::IsMember({"cond-n", "uncond"}));
    cmd->add_option("--n", cfg.n, "output qubit count");
    cmd->add_option(
        "--m",
        [&cfg](const CLI::results_t& res) {
            cfg.m = std::stoi(res[0]);
            return true;
        },
        "copy count for REPAUX conditions");
    cmd->add_option("--aux", cfg.aux, "auxiliary input bit string");
    cmd->add_option("--max-len", cfg.max_len, "maximum program length to enumerate");
    cmd->add_option("--fuel", cfg.fuel, "interpreter fuel (default 4*max_len + m*max_len)");
    cmd->add_option("--epsilon", cfg.epsilon, "approximation degree for the estimator");
    cmd->add_option("--alpha", cfg.alpha, "error probability budget");
    cmd->add_option("--trials", cfg.trials, "measurement trials per program (0: sized from alpha)");
    cmd->add_option("--seed", cfg.seed, "seed for the counter-based generator");
    cmd->add_option("--workers", cfg.workers, "enumeration worker threads");
    cmd->add_option("--out", cfg.out, "output path (default stdout)");
}

std::ostream& open_out(const RunConfig& cfg, std::ofstream& file) {
    if (cfg.out.empty()) return std::cout;
    file.open(cfg.out, std::ios::binary);
    if (!file) throw std::invalid_argument("cannot open " + cfg.out);
    return file;
}

qk::HaltTable obtain_table(const RunConfig& cfg, bool explicit_machine) {
    if (!cfg.table.empty()) {
        qk::HaltTable t = qk::load_table(cfg.table);
        if (explicit_machine && (!(t.spec == cfg.spec()) || !(t.cond == cfg.cond())))
            throw qk::TableError("table manifest does not match the requested machine/condition");
        return t;
    }
    return qk::dovetail(cfg.spec(), cfg.cond(), cfg.max_len, cfg.fuel, cfg.workers);
}

std::variant<qk::PureState, qk::FloatState> parse_state_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::invalid_argument("cannot open state file: " + path);
    nlohmann::json j;
    is >> j;
    int n = j.at("n").get<int>();
    if (n < 1 || n > 12) throw std::invalid_argument("state file: n out of range");
    const auto& amps = j.at("amps");
    if (!amps.is_array() || amps.size() != (size_t(1) << n))
        throw std::invalid_argument("state file: amplitude count does not match n");

    bool exact = true;
    for (const auto& entry : amps)
        if (!entry.is_array() || entry.size() != 2 || !entry[0].is_string()) exact = false;

    if (exact) {
        std::vector<qk::RingComplex> raw;
        for (const auto& entry : amps)
            raw.emplace_back(qk::parse_ring_real(entry[0].get<std::string>()),
                             qk::parse_ring_real(entry[1].get<std::string>()));
        qk::RingReal norm2{qk::Rational(1)};
        if (j.contains("norm2")) norm2 = qk::parse_ring_real(j["norm2"].get<std::string>());
        return qk::PureState(n, std::move(raw), norm2);
    }
    qk::FloatState fs;
    fs.n = n;
    for (const auto& entry : amps)
        fs.amps.emplace_back(entry[0].get<double>(), entry[1].get<double>());
    return fs;
}

ordered_json machine_json(const qk::MachineSpec& spec, const qk::ConditionSpec& cond) {
    return ordered_json{{"W", spec.workspace},
                        {"mode", qk::mode_name(spec.mode)},
                        {"n", cond.n},
                        {"m", cond.m ? ordered_json(*cond.m) : ordered_json(nullptr)},
                        {"aux", cond.aux.str()}};
}

ordered_json estimate_json(const qk::KEstimate& est, const qk::MachineSpec& spec,
                           const qk::ConditionSpec& cond) {
    ordered_json j;
    j["value"] = est.value ? ordered_json(*est.value) : ordered_json(nullptr);
    j["witness"] = est.witness.str();
    j["approx"] = est.approx_part;
    j["exact"] = est.exact;
    j["machine"] = machine_json(spec, cond);
    return j;
}

ordered_json state_json(const qk::PureState& s) {
    ordered_json amps = ordered_json::array();
    for (const auto& a : s.raw()) amps.push_back(ordered_json::array({a.re.str(), a.im.str()}));
    ordered_json j;
    j["n"] = s.qubits();
    j["amps"] = amps;
    if (!s.normalized_form()) j["norm2"] = s.norm2().str();
    return j;
}

int run_enumerate(const RunConfig& cfg) {
    qk::HaltTable table = qk::dovetail(cfg.spec(), cfg.cond(), cfg.max_len, cfg.fuel, cfg.workers);
    std::ofstream file;
    std::ostream& os = open_out(cfg, file);
    qk::save_table(table, os, cfg.digest());
    return 0;
}

int run_k(const RunConfig& cfg, bool explicit_machine) {
    auto target = parse_state_file(cfg.state);
    std::ofstream file;
    std::ostream& os = open_out(cfg, file);

    if (std::holds_alternative<qk::FloatState>(target)) {
        const auto& fs = std::get<qk::FloatState>(target);
        RunConfig adjusted = cfg;
        adjusted.n = fs.n;
        qk::HaltTable table = obtain_table(adjusted, explicit_machine);
        qk::KEstimate est = qk::k_quantum_float(fs, table);
        ordered_json j = estimate_json(est, table.spec, table.cond);
        j["float_tolerance"] = qk::kFloatFidelityTol;
        j["config_digest"] = cfg.digest();
        os << j.dump() << "\n";
        return 0;
    }

    const auto& ps = std::get<qk::PureState>(target);
    qk::KEstimate est;
    qk::MachineSpec spec = cfg.spec();
    qk::ConditionSpec cond = cfg.cond();
    if (cfg.exact) {
        if (cond.output_qubits() != ps.qubits()) {
            RunConfig adjusted = cfg;
            adjusted.n = ps.qubits();
            spec = adjusted.spec();
            cond = adjusted.cond();
        }
        est = qk::k_exact(ps, spec, cond, cfg.fuel);
    } else {
        qk::HaltTable table = obtain_table(cfg, explicit_machine);
        spec = table.spec;
        cond = table.cond;
        est = qk::k_quantum(ps, table);
    }
    ordered_json j = estimate_json(est, spec, cond);
    j["config_digest"] = cfg.digest();
    os << j.dump() << "\n";
    return 0;
}

int run_mc(const RunConfig& cfg, bool explicit_machine, const std::string& trace_path) {
    auto target = parse_state_file(cfg.state);
    if (!std::holds_alternative<qk::PureState>(target))
        throw std::invalid_argument("mc requires an exact-ring target state");
    const auto& ps = std::get<qk::PureState>(target);

    qk::MCConfig mc;
    mc.epsilon = cfg.epsilon;
    mc.alpha = cfg.alpha;
    mc.trials = cfg.trials;
    mc.seed = cfg.seed;

    qk::MCResult res;
    qk::MachineSpec spec = cfg.spec();
    qk::ConditionSpec cond = cfg.cond();
    if (!cfg.table.empty()) {
        qk::HaltTable table = obtain_table(cfg, explicit_machine);
        spec = table.spec;
        cond = table.cond;
        res = qk::mc_approximate(ps, table, mc);
    } else {
        res = qk::mc_approximate(ps, spec, cond, mc);
    }

    if (!trace_path.empty()) {
        std::ofstream trace(trace_path, std::ios::binary);
        if (!trace) throw std::invalid_argument("cannot open trace file: " + trace_path);
        for (const auto& row : res.trace) {
            ordered_json j;
            j["bits"] = row.bits.str();
            j["len"] = row.bits.size();
            j["m"] = row.successes;
            j["k"] = row.trials;
            j["est"] = row.est_value ? ordered_json(*row.est_value) : ordered_json(nullptr);
            j["est_real"] = row.est_value ? ordered_json(row.est_real) : ordered_json(nullptr);
            trace << j.dump() << "\n";
        }
    }

    std::ofstream file;
    std::ostream& os = open_out(cfg, file);
    ordered_json j = estimate_json(res.est, spec, cond);
    j["trials"] = res.trials;
    j["epsilon"] = cfg.epsilon;
    j["alpha"] = cfg.alpha;
    j["seed"] = cfg.seed;
    j["config_digest"] = cfg.digest();
    os << j.dump() << "\n";
    return 0;
}

int run_simulate(const RunConfig& cfg, const std::string& program) {
    qk::MachineSpec spec = cfg.spec();
    qk::ConditionSpec cond = cfg.cond();
    qk::BitString bits = qk::BitString::from_string(program);
    long long fuel = cfg.fuel > 0 ? cfg.fuel : qk::default_fuel(int(bits.size()), cond) + 16;
    qk::RunResult res = qk::run(spec, bits, cond, fuel);

    std::ofstream file;
    std::ostream& os = open_out(cfg, file);
    ordered_json j;
    j["program"] = program;
    j["machine"] = machine_json(spec, cond);
    if (auto* h = std::get_if<qk::Halted>(&res)) {
        j["result"] = "halted";
        j["steps"] = h->steps;
        j["state"] = state_json(h->output);
        ordered_json probs = ordered_json::array();
        for (const auto& p : h->output.measure_probs()) probs.push_back(p.str());
        j["probs"] = probs;
    } else if (auto* inv = std::get_if<qk::Invalid>(&res)) {
        j["result"] = "invalid";
        j["reason"] = inv->reason;
    } else {
        j["result"] = "fuel-exhausted";
    }
    os << j.dump() << "\n";
    return 0;
}

int run_codes(const std::string& op, const std::string& x, const std::string& y,
              const RunConfig& cfg) {
    std::ofstream file;
    std::ostream& os = open_out(cfg, file);
    if (op == "bar") {
        os << qk::encode_bar(qk::BitString::from_string(x)).str() << "\n";
    } else if (op == "prime") {
        os << qk::encode_prime(qk::BitString::from_string(x)).str() << "\n";
    } else {
        os << qk::encode_pair(qk::BitString::from_string(x), qk::BitString::from_string(y)).str()
           << "\n";
    }
    return 0;
}

int emit_report(const qk::AuditReport& report, const RunConfig& cfg) {
    ordered_json j = report.to_json();
    j["config_digest"] = cfg.digest();
    if (!cfg.out.empty()) {
        std::ofstream file(cfg.out, std::ios::binary);
        if (!file) throw std::invalid_argument("cannot open " + cfg.out);
        file << j.dump(2) << "\n";
    }
    report.render(std::cout);
    return report.all_pass() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"desk-scale laboratory for machine-relative quantum Kolmogorov complexity"};
    app.require_subcommand(1);

    RunConfig cfg;
    std::string config_path;
    app.add_option("--config", config_path, "JSON config file (flags override)");

    auto* cmd_enum = app.add_subcommand("enumerate", "build and save a halting-program table");
    add_common_flags(cmd_enum, cfg);

    auto* cmd_k = app.add_subcommand("k", "complexity of a target state");
    add_common_flags(cmd_k, cfg);
    cmd_k->add_option("--state", cfg.state, "target state file (JSON)")->required();
    cmd_k->add_option("--table", cfg.table, "halting table file");
    cmd_k->add_flag("--exact", cfg.exact, "enumerate to the stabilisation bound");

    auto* cmd_mc = app.add_subcommand("mc", "measurement-driven approximation of K");
    add_common_flags(cmd_mc, cfg);
    std::string trace_path;
    cmd_mc->add_option("--state", cfg.state, "target state file (JSON)")->required();
    cmd_mc->add_option("--table", cfg.table, "halting table file");
    cmd_mc->add_option("--trace", trace_path, "write the per-program trace (JSON Lines)");

    auto* cmd_sim = app.add_subcommand("simulate", "run a program literal");
    add_common_flags(cmd_sim, cfg);
    std::string program;
    cmd_sim->add_option("--program", program, "program bit string")->required();

    auto* cmd_codes = app.add_subcommand("codes", "self-delimiting code operations");
    std::string codes_op, codes_x, codes_y;
    cmd_codes->add_option("op", codes_op, "bar | prime | pair")
        ->required()
        ->check(CLI::IsMember({"bar", "prime", "pair"}));
    cmd_codes->add_option("x", codes_x, "first bit string (may be empty)");
    cmd_codes->add_option("y", codes_y, "second bit string (pair only)");
    cmd_codes->add_option("--out", cfg.out, "output path");

    auto* cmd_audit = app.add_subcommand("audit", "run a theorem audit");
    add_common_flags(cmd_audit, cfg);
    std::string audit_name;
    int delta = 0, c_param = 0, bases = 50, mult_m = 1, wa = 3, wb = 4;
    long long km = 0, bin_a = 0, bin_b = 0;
    std::string audit_x, audit_program;
    cmd_audit->add_option("name", audit_name, "audit name")
        ->required()
        ->check(CLI::IsMember({"upper-bound", "incompressibility-classical",
                               "incompressibility-quantum", "consistency", "subadditivity",
                               "multiples", "log-binomial", "cloning", "invariance",
                               "subadditive-restricted"}));
    cmd_audit->add_option("--table", cfg.table, "halting table file");
    cmd_audit->add_option("--table2", cfg.table2, "second table (2n qubits)");
    cmd_audit->add_option("--delta", delta, "randomness deficiency");
    cmd_audit->add_option("--c", c_param, "incompressibility slack");
    cmd_audit->add_option("--bases", bases, "number of seeded bases");
    cmd_audit->add_option("--x", audit_x, "classical witness string");
    cmd_audit->add_option("--program", audit_program, "program bit string");
    cmd_audit->add_option("--km", km, "K(m) supplied to the multiples bounds");
    cmd_audit->add_option("--mult-m", mult_m, "copy count m");
    cmd_audit->add_option("--wa", wa, "workspace of machine A");
    cmd_audit->add_option("--wb", wb, "workspace of machine B");
    cmd_audit->add_option("--a", bin_a, "binomial a");
    cmd_audit->add_option("--b", bin_b, "binomial b");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (!config_path.empty()) {
            std::ifstream is(config_path);
            if (!is) throw std::invalid_argument("cannot open config: " + config_path);
            nlohmann::json j;
            is >> j;
            if (j.contains("machine")) {
                if (j["machine"].contains("W")) cfg.machine_w = j["machine"]["W"].get<int>();
                if (j["machine"].contains("mode")) cfg.mode = j["machine"]["mode"].get<std::string>();
            }
            if (j.contains("cond")) {
                if (j["cond"].contains("n")) cfg.n = j["cond"]["n"].get<int>();
                if (j["cond"].contains("m") && !j["cond"]["m"].is_null())
                    cfg.m = j["cond"]["m"].get<int>();
                if (j["cond"].contains("aux")) cfg.aux = j["cond"]["aux"].get<std::string>();
            }
            if (j.contains("max_len")) cfg.max_len = j["max_len"].get<int>();
            if (j.contains("fuel")) cfg.fuel = j["fuel"].get<long long>();
            if (j.contains("mc")) {
                if (j["mc"].contains("epsilon")) cfg.epsilon = j["mc"]["epsilon"].get<double>();
                if (j["mc"].contains("alpha")) cfg.alpha = j["mc"]["alpha"].get<double>();
                if (j["mc"].contains("trials")) cfg.trials = j["mc"]["trials"].get<long long>();
                if (j["mc"].contains("seed")) cfg.seed = j["mc"]["seed"].get<uint64_t>();
            }
            if (j.contains("workers")) cfg.workers = j["workers"].get<int>();
        }

        const bool explicit_machine = cmd_k->count("--machine-W") || cmd_k->count("--n") ||
                                      cmd_mc->count("--machine-W") || cmd_mc->count("--n") ||
                                      cmd_audit->count("--machine-W") || cmd_audit->count("--n");

        if (app.got_subcommand(cmd_enum)) return run_enumerate(cfg);
        if (app.got_subcommand(cmd_k)) return run_k(cfg, explicit_machine);
        if (app.got_subcommand(cmd_mc)) return run_mc(cfg, explicit_machine, trace_path);
        if (app.got_subcommand(cmd_sim)) return run_simulate(cfg, program);
        if (app.got_subcommand(cmd_codes)) return run_codes(codes_op, codes_x, codes_y, cfg);

        if (app.got_subcommand(cmd_audit)) {
            if (audit_name == "multiples") {
                qk::MultiplesBounds mb = qk::multiples_bounds(cfg.n, mult_m, km);
                qk::AuditReport report;
                report.name = "multiples";
                report.parameters = {{"n", cfg.n}, {"m", mult_m}, {"K_m", km}};
                report.add("lower <= upper", "<= " + qk::detail::fmt_double(mb.upper),
                           qk::detail::fmt_double(mb.lower), mb.lower <= mb.upper);
                report.artifacts["lower"] = mb.lower;
                report.artifacts["upper"] = mb.upper;
                return emit_report(report, cfg);
            }
            if (audit_name == "log-binomial") {
                qk::LogBinomial lb = qk::log_binomial(bin_a, bin_b);
                qk::AuditReport report;
                report.name = "log-binomial";
                report.parameters = {{"a", bin_a}, {"b", bin_b}};
                report.add("exact vs asymptotic", qk::detail::fmt_double(lb.asymptotic),
                           qk::detail::fmt_double(lb.exact), true);
                report.artifacts["exact"] = lb.exact;
                report.artifacts["asymptotic"] = lb.asymptotic;
                return emit_report(report, cfg);
            }
            if (audit_name == "cloning") {
                qk::AuditReport report =
                    qk::cloning_check(qk::BitString::from_string(audit_program), cfg.n,
                                      cfg.m.value_or(1), cfg.spec(), cfg.fuel);
                return emit_report(report, cfg);
            }
            if (audit_name == "invariance") {
                std::vector<qk::PureState> corpus;
                for (size_t i = 0; i < (size_t(1) << cfg.n); ++i)
                    corpus.push_back(qk::PureState::basis(cfg.n, i));
                for (auto& s : qk::rotation_corpus(cfg.n)) corpus.push_back(s);
                qk::AuditReport report =
                    qk::invariance_gap(qk::MachineSpec{wa, qk::Mode::CondN},
                                       qk::MachineSpec{wb, qk::Mode::CondN}, corpus, cfg.n);
                return emit_report(report, cfg);
            }

            qk::HaltTable table = obtain_table(cfg, explicit_machine);
            if (audit_name == "upper-bound")
                return emit_report(qk::audit_upper_bound(table, table.cond.output_qubits()), cfg);
            if (audit_name == "incompressibility-classical")
                return emit_report(
                    qk::audit_incompressibility_classical(table, table.cond.output_qubits(), delta),
                    cfg);
            if (audit_name == "incompressibility-quantum") {
                int n = table.cond.output_qubits();
                qk::AuditReport combined;
                combined.name = "incompressibility-quantum";
                combined.parameters = {{"n", n}, {"c", c_param}, {"bases", bases}};
                bool all = true;
                long long min_count = (1LL << n);
                for (int s = 1; s <= bases; ++s) {
                    auto basis = qk::seeded_basis(n, uint64_t(s));
                    qk::AuditReport one =
                        qk::audit_incompressibility_quantum(basis, table, n, c_param);
                    all = all && one.all_pass();
                    min_count = std::min(min_count, one.artifacts["count"].get<long long>());
                }
                long long bound = (1LL << n) - (1LL << (n - c_param));
                combined.add("every seeded basis meets the counting bound",
                             ">= " + std::to_string(bound),
                             "min count " + std::to_string(min_count), all);
                qk::HardBasis hb = qk::construct_hard_basis(table, n);
                qk::AuditReport hard =
                    qk::audit_incompressibility_quantum(hb.basis, table, n, c_param);
                combined.add("hard basis meets the counting bound", ">= " + std::to_string(bound),
                             "count " + hard.artifacts["count"].dump(), hard.all_pass());
                return emit_report(combined, cfg);
            }
            if (audit_name == "consistency")
                return emit_report(qk::audit_consistency(table, table.cond.output_qubits()), cfg);
            if (audit_name == "subadditivity")
                return emit_report(
                    qk::subadditivity_witness(qk::BitString::from_string(audit_x), table), cfg);
            if (audit_name == "subadditive-restricted") {
                qk::HaltTable t2 =
                    cfg.table2.empty()
                        ? qk::dovetail(qk::MachineSpec{2 * cfg.n + 2, qk::Mode::CondN},
                                       qk::ConditionSpec{2 * cfg.n, std::nullopt, {}},
                                       cfg.max_len + 6, -1, cfg.workers)
                        : qk::load_table(cfg.table2);
                return emit_report(qk::subadditive_restricted_audit(table, t2), cfg);
            }
        }
        std::cerr << "unknown command\n";
        return 2;
    } catch (const qk::BudgetError& e) {
        std::cerr << "refused: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
