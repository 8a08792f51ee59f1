#pragma once
// Enumerates halting programs and persists the program -> state table that
// drives the complexity estimates.
//
// Two schedulers are provided: an exhaustive length-lexicographic sweep and
// the staged dovetailer (stage k runs step i of candidate k-i+1). Every
// accepted program of this machine halts within its own length bound, so
// both produce the identical canonical table; the dovetailer is kept for
// machine variants without that property.

#include "qk/bits.hpp"
#include "qk/machine.hpp"
#include "qk/ring.hpp"

#include "json.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <variant>
#include <vector>

namespace qk {

struct BudgetError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct TableError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline uint64_t candidate_budget() {
    if (const char* env = std::getenv("QKC_BUDGET")) {
        char* end = nullptr;
        unsigned long long v = std::strtoull(env, &end, 10);
        if (end && *end == '\0' && v > 0) return v;
    }
    return uint64_t(1) << 24;
}

inline uint64_t candidate_count(int max_len) {
    if (max_len < 0) return 0;
    if (max_len > 32) throw BudgetError("candidate space beyond any budget");
    return (uint64_t(2) << max_len) - 2;
}

struct HaltRecord {
    BitString bits;
    long long steps = 0;
    PureState output;
};

struct HaltTable {
    MachineSpec spec;
    ConditionSpec cond;
    int max_len = 0;
    long long fuel = 0;
    std::vector<HaltRecord> records;  // length-lexicographic by bits
};

enum class Scheduler { Sweep, Staged };

namespace detail {

// Candidate `idx` (0-based) in the length-lexicographic enumeration of all
// nonempty bit strings of length <= max_len.
inline BitString candidate_bits(uint64_t idx) {
    int len = 1;
    uint64_t block = 2;
    while (idx >= block) {
        idx -= block;
        block <<= 1;
        ++len;
    }
    return BitString::from_ordinal(len, idx);
}

inline void sweep_range(const MachineSpec& spec, const ConditionSpec& cond, long long fuel,
                        uint64_t begin, uint64_t end, uint64_t stride,
                        std::vector<std::pair<uint64_t, HaltRecord>>& out) {
    for (uint64_t idx = begin; idx < end; idx += stride) {
        BitString bits = candidate_bits(idx);
        RunResult res = run(spec, bits, cond, fuel);
        if (auto* h = std::get_if<Halted>(&res))
            out.emplace_back(idx, HaltRecord{bits, h->steps, h->output});
    }
}

// Faithful staged dovetailer over incremental interpreter states.
inline std::vector<std::pair<uint64_t, HaltRecord>> staged_dovetail(const MachineSpec& spec,
                                                                    const ConditionSpec& cond,
                                                                    long long fuel,
                                                                    uint64_t total) {
    struct Task {
        uint64_t idx;
        BitString bits;
        long long budget;  // instructions this task may still execute
        bool done = false;
    };
    std::vector<std::pair<uint64_t, HaltRecord>> found;
    std::vector<Task> tasks;
    tasks.reserve(size_t(total));
    for (uint64_t idx = 0; idx < total; ++idx)
        tasks.push_back(Task{idx, candidate_bits(idx), 0});

    // Stage k grants one more step to candidates 1..k; a task whose granted
    // budget reaches its halting step count resolves. Interpreting a prefix
    // of a program has no side effects here, so granting budget b is the
    // same as running with fuel b.
    size_t unresolved = tasks.size();
    for (uint64_t stage = 1; unresolved > 0; ++stage) {
        uint64_t hi = stage < total ? stage : total;
        for (uint64_t t = 0; t < hi; ++t) {
            Task& task = tasks[size_t(t)];
            if (task.done) continue;
            ++task.budget;
            if (task.budget > fuel) {
                task.done = true;  // fuel exhausted for good
                --unresolved;
                continue;
            }
            RunResult res = run(spec, task.bits, cond, task.budget);
            if (std::holds_alternative<FuelExhausted>(res)) continue;  // needs more stages
            task.done = true;
            --unresolved;
            if (auto* h = std::get_if<Halted>(&res))
                found.emplace_back(task.idx, HaltRecord{task.bits, h->steps, h->output});
        }
    }
    return found;
}

}  // namespace detail

inline HaltTable dovetail(const MachineSpec& spec, const ConditionSpec& cond, int max_len,
                          long long fuel = -1, int workers = 1,
                          Scheduler scheduler = Scheduler::Sweep) {
    spec.validate();
    cond.validate(spec);
    if (fuel < 0) fuel = default_fuel(max_len, cond);
    uint64_t total = candidate_count(max_len);
    if (total > candidate_budget())
        throw BudgetError("enumeration of " + std::to_string(total) +
                          " candidates exceeds the configured budget");

    std::vector<std::pair<uint64_t, HaltRecord>> found;
    if (scheduler == Scheduler::Staged) {
        found = detail::staged_dovetail(spec, cond, fuel, total);
    } else if (workers <= 1) {
        detail::sweep_range(spec, cond, fuel, 0, total, 1, found);
    } else {
        std::vector<std::vector<std::pair<uint64_t, HaltRecord>>> parts(static_cast<size_t>(workers));
        std::vector<std::thread> threads;
        threads.reserve(size_t(workers));
        for (int w = 0; w < workers; ++w)
            threads.emplace_back([&, w] {
                detail::sweep_range(spec, cond, fuel, uint64_t(w), total, uint64_t(workers),
                                    parts[size_t(w)]);
            });
        for (auto& t : threads) t.join();
        for (auto& part : parts)
            found.insert(found.end(), std::make_move_iterator(part.begin()),
                         std::make_move_iterator(part.end()));
    }

    // Canonical order: by candidate index == length-lexicographic.
    std::sort(found.begin(), found.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });

    HaltTable table{spec, cond, max_len, fuel, {}};
    table.records.reserve(found.size());
    for (auto& [idx, rec] : found) table.records.push_back(std::move(rec));
    return table;
}

// ----------------------------------------------------------------------------
// Persistence: JSON Lines, first line a manifest with a content digest.

inline uint64_t fnv1a64(std::string_view data, uint64_t h = 1469598103934665603ULL) {
    for (unsigned char c : data) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

inline std::string digest_hex(uint64_t h) {
    static const char* hexd = "0123456789abcdef";
    std::string s(16, '0');
    for (int i = 15; i >= 0; --i) {
        s[size_t(i)] = hexd[h & 0xF];
        h >>= 4;
    }
    return s;
}

namespace detail {

inline nlohmann::ordered_json state_json(const PureState& s) {
    nlohmann::ordered_json amps = nlohmann::ordered_json::array();
    for (const auto& a : s.raw())
        amps.push_back(nlohmann::ordered_json::array({a.re.str(), a.im.str()}));
    return amps;
}

inline std::string record_line(const HaltRecord& rec) {
    nlohmann::ordered_json j;
    j["bits"] = rec.bits.str();
    j["steps"] = rec.steps;
    j["state"] = state_json(rec.output);
    if (!rec.output.normalized_form()) j["norm2"] = rec.output.norm2().str();
    return j.dump();
}

inline PureState state_from_json(const nlohmann::json& amps, const nlohmann::json* norm2) {
    if (!amps.is_array() || amps.empty()) throw TableError("malformed state");
    size_t dim = amps.size();
    int n = 0;
    while ((size_t(1) << n) < dim) ++n;
    if ((size_t(1) << n) != dim) throw TableError("state dimension not a power of two");
    std::vector<RingComplex> raw;
    raw.reserve(dim);
    for (const auto& entry : amps) {
        if (!entry.is_array() || entry.size() != 2) throw TableError("malformed amplitude");
        raw.emplace_back(parse_ring_real(entry[0].get<std::string>()),
                         parse_ring_real(entry[1].get<std::string>()));
    }
    RingReal nrm2{Rational(1)};
    if (norm2) nrm2 = parse_ring_real(norm2->get<std::string>());
    return PureState(n, std::move(raw), nrm2);
}

}  // namespace detail

inline void save_table(const HaltTable& table, std::ostream& os,
                       const std::string& config_digest = "") {
    std::string body;
    for (const auto& rec : table.records) {
        body += detail::record_line(rec);
        body += '\n';
    }
    nlohmann::ordered_json manifest;
    manifest["format"] = 1;
    manifest["W"] = table.spec.workspace;
    manifest["mode"] = mode_name(table.spec.mode);
    manifest["n"] = table.cond.n;
    if (table.cond.m)
        manifest["m"] = *table.cond.m;
    else
        manifest["m"] = nullptr;
    manifest["aux"] = table.cond.aux.str();
    manifest["max_len"] = table.max_len;
    manifest["fuel"] = table.fuel;
    if (!config_digest.empty()) manifest["config_digest"] = config_digest;
    manifest["digest"] = digest_hex(fnv1a64(body));
    os << manifest.dump() << '\n' << body;
}

inline void save_table(const HaltTable& table, const std::string& path,
                       const std::string& config_digest = "") {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw TableError("cannot open table file for writing: " + path);
    save_table(table, os, config_digest);
}

inline HaltTable load_table(std::istream& is) {
    std::string line;
    if (!std::getline(is, line)) throw TableError("empty table file");
    nlohmann::json manifest;
    try {
        manifest = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
        throw TableError(std::string("malformed manifest: ") + e.what());
    }
    if (!manifest.contains("format") || manifest["format"] != 1)
        throw TableError("table format version mismatch");

    HaltTable table;
    table.spec.workspace = manifest.at("W").get<int>();
    table.spec.mode = mode_from_name(manifest.at("mode").get<std::string>());
    table.cond.n = manifest.at("n").get<int>();
    if (manifest.contains("m") && !manifest["m"].is_null()) table.cond.m = manifest["m"].get<int>();
    table.cond.aux = BitString::from_string(manifest.at("aux").get<std::string>());
    table.max_len = manifest.at("max_len").get<int>();
    table.fuel = manifest.at("fuel").get<long long>();
    const std::string want_digest = manifest.at("digest").get<std::string>();

    std::string body;
    std::vector<std::string> lines;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        body += line;
        body += '\n';
        lines.push_back(line);
    }
    if (digest_hex(fnv1a64(body)) != want_digest)
        throw TableError("table digest mismatch (truncated or edited file)");

    for (const auto& ln : lines) {
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(ln);
        } catch (const nlohmann::json::exception& e) {
            throw TableError(std::string("malformed record: ") + e.what());
        }
        HaltRecord rec{BitString::from_string(j.at("bits").get<std::string>()),
                       j.at("steps").get<long long>(),
                       detail::state_from_json(j.at("state"),
                                               j.contains("norm2") ? &j.at("norm2") : nullptr)};
        if (int(rec.bits.size()) > table.max_len)
            throw TableError("record longer than manifest max_len");
        table.records.push_back(std::move(rec));
    }
    return table;
}

inline HaltTable load_table(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw TableError("cannot open table file: " + path);
    return load_table(is);
}

inline bool tables_equal(const HaltTable& a, const HaltTable& b) {
    if (!(a.spec == b.spec) || !(a.cond == b.cond) || a.max_len != b.max_len || a.fuel != b.fuel ||
        a.records.size() != b.records.size())
        return false;
    for (size_t i = 0; i < a.records.size(); ++i) {
        if (!(a.records[i].bits == b.records[i].bits) || a.records[i].steps != b.records[i].steps ||
            !(a.records[i].output == b.records[i].output))
            return false;
    }
    return true;
}

}  // namespace qk
