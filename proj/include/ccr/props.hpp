#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "ccr/replicas.hpp"

namespace ccr {

enum class Check { tp1, tp2, sym, idem, comm };

std::string_view check_name(Check c);
/// Accepts tp1, tp2, sym, idem, comm and all. Throws std::invalid_argument.
std::set<Check> parse_checks(std::string_view name);

/// A property case as the intents that built it. The base patch is issued
/// from initial(kind) by site 3, p, q and r by sites 0, 1 and 2, each from
/// the base state. Intents that turn out ineffective are skipped.
struct PropertyCase {
    std::vector<Intent> base, p, q, r;
};

struct Materialized {
    State d;
    Patch base, p, q, r;
};

Materialized materialize(const Kind& kind, const PropertyCase& c);

struct Counterexample {
    Check check = Check::tp1;
    std::uint64_t trial_seed = 0;
    std::string message;
    PropertyCase original;
    PropertyCase shrunk;
};

struct CheckStats {
    std::size_t passed = 0;
    std::size_t failed = 0;
};

struct PropertyReport {
    Kind kind;
    std::size_t trials = 0;
    std::uint64_t seed = 0;
    std::map<Check, CheckStats> stats;
    std::optional<Counterexample> first_failure;

    bool ok() const;
    std::string to_json() const;
};

struct PropertyOptions {
    std::set<Check> checks{Check::tp1, Check::tp2, Check::sym, Check::idem, Check::comm};
    /// Replaces the catalog primitive; used to test the harness itself.
    const PrimitiveTransform* primitive = nullptr;
    bool shrink = true;
};

/// Runs every selected check on `trials` random cases. Trial i draws from
/// its own generator seeded with (seed, i), so single trials can be replayed.
PropertyReport check_properties(const Kind& kind, std::size_t trials, std::uint64_t seed,
                                const PropertyOptions& opts = {});

PropertyCase random_case(const Kind& kind, std::uint64_t trial_seed);
std::uint64_t trial_seed(std::uint64_t seed, std::size_t trial);

/// nullopt when the case passes, else a description of the failure.
std::optional<std::string> run_check(const Kind& kind, Check c, const PropertyCase& pc,
                                     const PrimitiveTransform* primitive = nullptr);

/// Removes trailing intents, then shortens string payloads, then drops r,
/// keeping each step only while the check still fails.
PropertyCase shrink_case(const Kind& kind, Check c, PropertyCase pc,
                         const PrimitiveTransform* primitive = nullptr);

/// A deliberately wrong text primitive: equal-position inserts are ordered by
/// argument position instead of by uid. Everything else is the catalog rule.
PrimitiveTransform broken_text_tiebreak();

}  // namespace ccr
