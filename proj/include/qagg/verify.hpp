// Copyright 2026 The qagg Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include "qagg/gdg.hpp"
#include "qagg/optctrl/min_time.hpp"

#include <json.hpp>

#include <algorithm>
#include <memory>
#include <random>
#include <sstream>
#include <string>
#include <vector>

namespace qagg {

/// One pulse instruction of a compiled program.
struct CompiledInstruction {
  int index = 0;                ///< position in the pulse program
  NodeId node = kRoot;          ///< owning GDG node
  std::vector<Gate> gates;      ///< on physical qubits
  std::vector<Qubit> qubits;    ///< sorted physical support
  double duration_ns = 0.0;
  std::shared_ptr<const optctrl::PulseRecord> pulse;  ///< null in TABLE mode

  Matrix target_unitary() const { return sequence_unitary(gates, qubits); }
};

struct InstructionCheck {
  int index = 0;
  NodeId node = kRoot;
  double fidelity = 0.0;
  double duration_ns = 0.0;
  bool pass = false;
};

struct VerificationReport {
  double threshold = 0.999;
  std::vector<InstructionCheck> checks;
  bool pass = false;

  nlohmann::json to_json() const {
    nlohmann::json j;
    j["threshold"] = threshold;
    j["pass"] = pass;
    j["checks"] = nlohmann::json::array();
    for (const auto& c : checks) {
      j["checks"].push_back({{"instruction", c.index}, {"node", c.node}, {"fidelity", c.fidelity},
                             {"duration_ns", c.duration_ns}, {"pass", c.pass}});
    }
    return j;
  }

  std::string to_text() const {
    std::ostringstream os;
    os << "verification: " << (pass ? "PASS" : "FAIL") << " (" << checks.size() << " sampled, threshold "
       << threshold << ")\n";
    for (const auto& c : checks) {
      os << "  #" << c.index << " node " << c.node << "  " << c.duration_ns << " ns  fidelity " << c.fidelity
         << (c.pass ? "" : "  FAIL") << "\n";
    }
    return os.str();
  }
};

/// Fidelity of `pulses` under `model` against the instruction's target.
inline double verify_instruction(const CompiledInstruction& ins, const optctrl::ControlPulses& pulses,
                                 const optctrl::HamiltonianModel& model) {
  if (model.num_qubits != static_cast<int>(ins.qubits.size())) {
    throw Error("verify: instruction " + std::to_string(ins.index) + " does not match its pulse model");
  }
  return 1.0 - optctrl::infidelity(optctrl::evolve(pulses, model), ins.target_unitary());
}

inline double verify_instruction(const CompiledInstruction& ins) {
  if (!ins.pulse) throw Error("verify: instruction " + std::to_string(ins.index) + " has no pulses");
  return verify_instruction(ins, ins.pulse->result.pulses, ins.pulse->model);
}

/// Verifies min(n, count) distinct instructions drawn uniformly with `seed`.
inline VerificationReport sample_verify(const std::vector<CompiledInstruction>& program, int n = 10,
                                        std::uint64_t seed = 1, double threshold = 0.999) {
  VerificationReport rep;
  rep.threshold = threshold;
  std::vector<std::size_t> idx(program.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  std::mt19937_64 rng(seed);
  std::shuffle(idx.begin(), idx.end(), rng);
  idx.resize(std::min<std::size_t>(idx.size(), static_cast<std::size_t>(std::max(0, n))));
  std::sort(idx.begin(), idx.end());
  rep.pass = !idx.empty();
  for (std::size_t i : idx) {
    const CompiledInstruction& ins = program[i];
    InstructionCheck c;
    c.index = ins.index;
    c.node = ins.node;
    c.duration_ns = ins.duration_ns;
    c.fidelity = verify_instruction(ins);
    c.pass = c.fidelity >= threshold;
    rep.pass = rep.pass && c.pass;
    rep.checks.push_back(c);
  }
  return rep;
}

}  // namespace qagg
