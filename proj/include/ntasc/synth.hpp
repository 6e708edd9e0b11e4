#pragma once
// Production of the shared-clock-free network: the estimator is paired with
// the rewritten observer into a single component, the pair labels are mapped
// back to the original alphabet via psi, and the output is checked to contain
// no reads of the watched automaton's clocks.

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "ntasc/contextual.hpp"
#include "ntasc/smod.hpp"
#include "ntasc/zones.hpp"

namespace ntasc {

// Raised by synthesize() when the observer provably depends on the shared
// clocks, i.e. the dead location of the checking system is reachable.
struct NeedDetected : std::runtime_error {
  NeedDetected() : std::runtime_error("observer provably needs the shared clocks") {}
};

struct SynthesizedNetwork {
  Network net;  // estimator || paired observer, synthesized tier
  // psi's label component: announced pair label -> original sync label.
  std::map<std::string, std::string> label_map;
  // Full map on the reachable enriched sync labels, one relation per line,
  // "(<label>,<region-id>) -> (<label>,<region-id>)" followed by a legend
  // that spells out each region id.
  std::vector<std::string> psi_lines;
};

SynthesizedNetwork synthesize(const Network& net, size_t budget = kDefaultBudget);

// Applies psi to an enriched sync label of the synthesized network: the pair
// label is mapped back through label_map, the region part is kept.
std::string psi_apply(const SynthesizedNetwork& sn, const std::string& enriched);

// True iff the paired observer never reads a clock owned by the watched
// automaton (copies on sync edges excepted) and the watched automaton reads
// only its own clocks.
bool verify_no_shared_reads(const SynthesizedNetwork& sn);

struct Verdict {
  enum Kind { NotNeeded, Needed, Inconclusive } kind = NotNeeded;
  std::optional<SynthesizedNetwork> synth;      // NotNeeded
  std::optional<Trace> trace;                   // Needed (region/zone engines)
  std::optional<RestrictionWitness> witness;    // Needed/Inconclusive
};

// Decides whether the observer needs the shared clocks. NotNeeded carries the
// synthesized replacement; Needed requires a deterministic observer and
// carries the evidence; otherwise the verdict is Inconclusive with a witness.
// Engine::All cross-checks every applicable engine and throws on disagreement.
Verdict decide_need(const Network& net, Engine engine = Engine::All,
                    size_t budget = kDefaultBudget);

}  // namespace ntasc
