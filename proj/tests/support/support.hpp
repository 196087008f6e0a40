#pragma once

#include "nocfg/analysis.hpp"
#include "nocfg/frontend.hpp"
#include "nocfg/oracle.hpp"

#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <vector>

namespace nocfg::testing {

std::string fixture_path(const std::string &relative);
std::string read_text(const std::string &path);
Program load_fixture(const std::string &relative);

/// Reflection-free programs under fixtures/sound, sorted by name.
std::vector<std::string> soundness_fixtures();

/// Every fixture the analysis should handle, including the reflective ones.
std::vector<std::string> all_fixtures();

/// Violations of "dynamic behaviour is covered by the static result".
struct SoundnessReport {
    std::vector<std::string> missing_edges;
    std::vector<std::string> missing_types;
    bool ok() const { return missing_edges.empty() && missing_types.empty(); }
    std::string describe() const;
};

SoundnessReport check_soundness(const Program &program, const AnalysisResult &analysis,
                                const InterpretResult &run);

/// A copy of the program whose method bodies went through `reorder`.
Program rebuild(const Program &program,
                const std::function<std::vector<StatementNode>(const std::vector<StatementNode> &)> &reorder);

Program shuffle_bodies(const Program &program, std::mt19937 &rng);

/// A random terminating program in the accepted subset with a `main` entry.
/// Calls only go from higher to lower levels, so execution cannot recurse.
std::string generate_program(std::uint32_t seed);

/// Counts table updates that fail to extend the previous value.
class MonotonicityObserver : public AnalysisObserver {
public:
    void on_state(std::size_t, Vertex, const TypeEnv *before, const TypeEnv &after) override;
    void on_summary(std::size_t, const TypeEnv *before, const TypeEnv &after) override;
    std::size_t updates = 0;
    std::size_t violations = 0;
};

/// The growth bound of the fixed-point iteration: each stored state is
/// defined once and then grows at most once per (variable, type value) pair.
bool within_growth_bound(const AnalysisStats &stats);

bool call_free(const StatementNode &node);

/// Call-free statements whose transfer function changes the stored state in
/// front of them in some context, rendered as source text. Empty at a fixed
/// point. Needs a result produced with keep_contexts.
std::vector<std::string> reapplication_failures(const Program &program, const AnalysisResult &result);

/// Name-keyed view of an environment: "scope name" -> sorted type names.
std::map<std::string, std::set<std::string>> named_env(const Program &program, const TypeEnv &env);

} // namespace nocfg::testing
