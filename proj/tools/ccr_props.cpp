// ccr-props: randomized TP1/TP2/symmetry/idempotence/commutativity checks.
#include <CLI11.hpp>
#include <chrono>
#include <iostream>

#include "ccr/errors.hpp"
#include "ccr/props.hpp"

int main(int argc, char** argv)
{
    CLI::App app{"Randomized confluence property checks for one replica kind"};
    std::string replica;
    std::size_t trials = 1000;
    std::uint64_t seed = 7;
    std::string check = "all";
    bool broken = false;
    bool no_shrink = false;
    app.add_option("--replica", replica, "counter|addmult|lww|eset|queue|text|socialmedia|tuple(..)|map(..)")
        ->required();
    app.add_option("--trials", trials, "number of random cases");
    app.add_option("--seed", seed, "base seed");
    app.add_option("--check", check, "tp1|tp2|sym|idem|comm|all");
    app.add_flag("--broken-tiebreak", broken, "use a deliberately wrong text insert tie-break");
    app.add_flag("--no-shrink", no_shrink, "report the first counterexample unshrunk");
    CLI11_PARSE(app, argc, argv);

    ccr::Kind kind;
    ccr::PropertyOptions opts;
    try {
        kind = ccr::Kind::parse(replica);
        opts.checks = ccr::parse_checks(check);
    } catch (const std::exception& e) {
        std::cerr << "ccr-props: " << e.what() << '\n';
        return 2;
    }
    const ccr::PrimitiveTransform bad = ccr::broken_text_tiebreak();
    if (broken) opts.primitive = &bad;
    opts.shrink = !no_shrink;

    const auto start = std::chrono::steady_clock::now();
    const ccr::PropertyReport report = ccr::check_properties(kind, trials, seed, opts);
    const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                        std::chrono::steady_clock::now() - start)
                        .count();

    std::cout << kind.name() << ": " << trials << " trials, seed " << seed << ", " << ms << " ms\n";
    for (const auto& [c, s] : report.stats)
        std::cout << "  " << ccr::check_name(c) << ": " << s.passed << " passed, " << s.failed << " failed\n";
    if (report.first_failure)
        std::cout << "  first failure (" << ccr::check_name(report.first_failure->check)
                  << "): " << report.first_failure->message << '\n';
    std::cout << report.to_json() << '\n';
    return report.ok() ? 0 : 1;
}
