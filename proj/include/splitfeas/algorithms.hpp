#pragma once

#include <optional>
#include <string_view>

namespace splitfeas {

/// The seven solver families exposed by the library.
enum class AlgorithmId {
  PADMM_SF1,    // proximal ADMM on the split indicator model (experimental)
  PG_SF1P,      // parallel projected gradient on the penalized model
  AM_SF1P,      // alternating minimization on the penalized model
  CQ_SF1P,      // semi-alternating projected gradient == CQ iteration
  PG_SF3,       // projected gradient on the half-squared-distance model
  WPADMM_SF4,   // weighted proximal ADMM (prox-identity or linearized weight)
  CQ_MULTISET,  // simultaneous CQ iteration over several (A_j, Q_j) blocks
};

/// Weight matrix choice for WPADMM_SF4: N = tau*I or N = tau*I - rho*A^T A.
enum class NMode { ProxIdentity, Linearized };

inline std::string_view to_string(AlgorithmId id) {
  switch (id) {
    case AlgorithmId::PADMM_SF1: return "padmm-sf1";
    case AlgorithmId::PG_SF1P: return "pg-sf1p";
    case AlgorithmId::AM_SF1P: return "am-sf1p";
    case AlgorithmId::CQ_SF1P: return "cq";
    case AlgorithmId::PG_SF3: return "pg-sf3";
    case AlgorithmId::WPADMM_SF4: return "wpadmm-sf4";
    case AlgorithmId::CQ_MULTISET: return "cq-multiset";
  }
  return "unknown";
}

inline std::string_view to_string(NMode mode) {
  return mode == NMode::ProxIdentity ? "prox-identity" : "linearized";
}

inline std::optional<AlgorithmId> algorithm_from_string(std::string_view name) {
  if (name == "padmm-sf1") return AlgorithmId::PADMM_SF1;
  if (name == "pg-sf1p") return AlgorithmId::PG_SF1P;
  if (name == "am-sf1p") return AlgorithmId::AM_SF1P;
  if (name == "cq") return AlgorithmId::CQ_SF1P;
  if (name == "pg-sf3") return AlgorithmId::PG_SF3;
  if (name == "wpadmm-sf4") return AlgorithmId::WPADMM_SF4;
  if (name == "cq-multiset") return AlgorithmId::CQ_MULTISET;
  return std::nullopt;
}

inline std::optional<NMode> n_mode_from_string(std::string_view name) {
  if (name == "prox-identity") return NMode::ProxIdentity;
  if (name == "linearized") return NMode::Linearized;
  return std::nullopt;
}

/// True for algorithms that maintain a multiplier sequence y^k.
inline bool is_lagrangian(AlgorithmId id) {
  return id == AlgorithmId::PADMM_SF1 || id == AlgorithmId::WPADMM_SF4;
}

/// True for algorithms whose state carries the split variable u^k.
inline bool has_split_variable(AlgorithmId id) {
  return id != AlgorithmId::PG_SF3 && id != AlgorithmId::CQ_MULTISET;
}

}  // namespace splitfeas
