// Copyright 2026 The mkp Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

/**
 * @file report.hpp
 * @brief JSON and text serialization of harness results.
 *
 * Keys are emitted in a fixed order.  Basis labels are strings ("ddot0" or
 * the decimal index) and exact probabilities are {num, den_pow} with the
 * denominator d^den_pow.
 */

#pragma once

#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "mkp/error.hpp"
#include "mkp/harness.hpp"

namespace mkp {

inline constexpr const char* kVersion = "1.0.0";

using Json = nlohmann::ordered_json;

enum class ReportFormat { Json, Text };

inline ReportFormat parse_format(const std::string& tag) {
  if (tag == "json") return ReportFormat::Json;
  if (tag == "text") return ReportFormat::Text;
  throw Error(Errc::UnsupportedFormat, "unknown report format '" + tag + "'");
}

inline Json to_json(LabelPair p) { return Json::array({p.u, p.v}); }

inline Json to_json(const PowerRational& p) { return Json{{"num", p.num()}, {"den_pow", p.den_pow()}}; }

inline Json to_json(const BranchWeight& w) {
  Json j{{"b", w.b.to_string()}, {"m", w.m},   {"r1", to_json(w.r1)},
         {"m2", w.m2},            {"r2", to_json(w.r2)}, {"prob", to_json(w.prob)}};
  if (w.control1) j["c1"] = *w.control1;
  if (w.final_outcome) j["final"] = *w.final_outcome;
  return j;
}

inline Json to_json(const std::vector<BranchWeight>& branches) {
  Json arr = Json::array();
  for (const auto& w : branches) arr.push_back(to_json(w));
  return arr;
}

inline Json to_json(const DecodeResult& r) {
  Json j{{"status", r.determined() ? "determined" : "undetermined"}};
  j["basis"] = r.basis ? Json(r.basis->to_string()) : Json(nullptr);
  j["m"] = r.outcome_m ? Json(*r.outcome_m) : Json(nullptr);
  return j;
}

inline Json to_json(const Transcript& t) {
  Json j{{"prep", to_json(t.alice.prep)}, {"r1", to_json(t.alice.r1)}};
  j["r2"] = t.alice.r2 ? to_json(*t.alice.r2) : Json(nullptr);
  if (t.alice.control1_outcome) j["c1"] = *t.alice.control1_outcome;
  if (t.alice.final_outcome) j["final"] = *t.alice.final_outcome;
  j["king"] = Json{{"b", t.sealed.basis.to_string()}, {"m", t.sealed.m}};
  j["king"]["m2"] = t.sealed.m2 ? Json(*t.sealed.m2) : Json(nullptr);
  j["decoded"] = to_json(t.decoded);
  j["verified"] = t.verified;
  return j;
}

inline Json to_json(const TrialStatistics& s) {
  Json per = Json::array();
  for (const auto& [b, t] : s.per_basis) {
    per.push_back(Json{{"basis", b.to_string()}, {"trials", t.trials}, {"determined", t.determined},
                       {"correct", t.correct}});
  }
  return Json{{"dim", s.d.value()},
              {"mode", to_string(s.mode)},
              {"trials", s.trials},
              {"determined", s.determined},
              {"undetermined", s.undetermined},
              {"correct", s.correct},
              {"failure_rate", s.failure_rate},
              {"per_basis", std::move(per)},
              {"seed", s.master_seed},
              {"version", kVersion}};
}

inline Json to_json(const KeyReport& r) {
  return Json{{"dim", r.d.value()},
              {"mode", to_string(r.mode)},
              {"role", to_string(r.role)},
              {"rounds", r.rounds},
              {"target", r.target},
              {"expected_rounds", r.expected_rounds},
              {"key_alice", r.alice_key},
              {"key_king", r.king_key},
              {"auth_alice", r.alice_auth},
              {"auth_king", r.king_auth},
              {"mismatches", r.mismatches},
              {"seed", r.master_seed},
              {"version", kVersion}};
}

// ---------------------------------------------------------------------------
// Parsing back (schema checks and round-trips).

namespace detail {

inline const Json& field(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) {
    throw Error(Errc::MalformedInput, std::string("report is missing field '") + key + "'");
  }
  return j.at(key);
}

inline LabelPair pair_from_json(const Json& j) {
  if (!j.is_array() || j.size() != 2) throw Error(Errc::MalformedInput, "label pair must be [u, v]");
  return {j[0].get<int>(), j[1].get<int>()};
}

}  // namespace detail

inline TrialStatistics statistics_from_json(const Json& j) {
  try {
    TrialStatistics s{validate_dimension(detail::field(j, "dim").get<int>()),
                      parse_mode(detail::field(j, "mode").get<std::string>())};
    s.trials = detail::field(j, "trials").get<std::uint64_t>();
    s.determined = detail::field(j, "determined").get<std::uint64_t>();
    s.undetermined = detail::field(j, "undetermined").get<std::uint64_t>();
    s.correct = detail::field(j, "correct").get<std::uint64_t>();
    s.failure_rate = detail::field(j, "failure_rate").get<double>();
    s.master_seed = detail::field(j, "seed").get<std::uint64_t>();
    for (const auto& e : detail::field(j, "per_basis")) {
      const BasisLabel b = BasisLabel::parse(detail::field(e, "basis").get<std::string>(), s.d);
      s.per_basis[b] = BasisTally{detail::field(e, "trials").get<std::uint64_t>(),
                                  detail::field(e, "determined").get<std::uint64_t>(),
                                  detail::field(e, "correct").get<std::uint64_t>()};
    }
    detail::field(j, "version");
    return s;
  } catch (const Json::exception& e) {
    throw Error(Errc::MalformedInput, e.what());
  }
}

inline std::vector<BranchWeight> branches_from_json(const Json& j, PrimeDim d) {
  if (!j.is_array()) throw Error(Errc::MalformedInput, "branch dump must be an array");
  std::vector<BranchWeight> out;
  try {
    for (const auto& e : j) {
      const Json& p = detail::field(e, "prob");
      BranchWeight w{BasisLabel::parse(detail::field(e, "b").get<std::string>(), d),
                     detail::field(e, "m").get<int>(),
                     detail::pair_from_json(detail::field(e, "r1")),
                     detail::field(e, "m2").get<int>(),
                     detail::pair_from_json(detail::field(e, "r2")),
                     PowerRational(d.value(), detail::field(p, "num").get<std::int64_t>(),
                                   detail::field(p, "den_pow").get<int>()),
                     std::nullopt,
                     std::nullopt};
      if (e.contains("c1")) w.control1 = e["c1"].get<int>();
      if (e.contains("final")) w.final_outcome = e["final"].get<int>();
      out.push_back(std::move(w));
    }
  } catch (const Json::exception& e) {
    throw Error(Errc::MalformedInput, e.what());
  }
  return out;
}

// ---------------------------------------------------------------------------
// Text rendering.

inline std::string format_rational(const PowerRational& p) {
  if (p.is_zero()) return "0";
  if (p.den_pow() == 0) return std::to_string(p.num());
  if (p.den_pow() == 1) return std::to_string(p.num()) + "/" + std::to_string(p.base());
  return std::to_string(p.num()) + "/" + std::to_string(p.base()) + "^" + std::to_string(p.den_pow());
}

inline std::string to_text(const TrialStatistics& s) {
  std::ostringstream os;
  os << "dim            " << s.d.value() << "\n"
     << "mode           " << to_string(s.mode) << "\n"
     << "trials         " << s.trials << "\n"
     << "determined     " << s.determined << "\n"
     << "undetermined   " << s.undetermined << "\n"
     << "correct        " << s.correct << "\n"
     << "failure_rate   " << std::setprecision(6) << std::fixed << s.failure_rate << "\n"
     << "seed           " << s.master_seed << "\n";
  os << "basis  trials  determined  correct\n";
  for (const auto& [b, t] : s.per_basis) {
    os << std::left << std::setw(7) << b.to_string() << std::right << std::setw(6) << t.trials << std::setw(12)
       << t.determined << std::setw(9) << t.correct << "\n";
  }
  return os.str();
}

inline std::string to_text(const std::vector<BranchWeight>& branches) {
  std::ostringstream os;
  for (const auto& w : branches) {
    os << "b=" << w.b.to_string() << " m=" << w.m << " r1=(" << w.r1.u << "," << w.r1.v << ")";
    if (w.control1) os << " c1=" << *w.control1;
    os << " m2=" << w.m2 << " r2=(" << w.r2.u << "," << w.r2.v << ")";
    if (w.final_outcome) os << " final=" << *w.final_outcome;
    os << " p=" << format_rational(w.prob) << "\n";
  }
  return os.str();
}

inline std::string to_text(const KeyReport& r) {
  const auto join = [](const std::vector<int>& xs) {
    std::string s;
    for (int x : xs) s += std::to_string(x) + " ";
    if (!s.empty()) s.pop_back();
    return s;
  };
  std::ostringstream os;
  os << "dim " << r.d.value() << ", mode " << to_string(r.mode) << ", role " << to_string(r.role) << "\n"
     << "rounds " << r.rounds << " for " << r.alice_key.size() << "/" << r.target << " symbols (expected "
     << std::setprecision(1) << std::fixed << r.expected_rounds << ")\n"
     << "key   " << join(r.alice_key) << "\n"
     << "auth  " << join(r.alice_auth) << "\n"
     << "mismatches " << r.mismatches << "\n";
  return os.str();
}

/// Serializes any reportable value in the requested format.
template <class T>
std::string emit_report(const T& value, ReportFormat format) {
  if (format == ReportFormat::Json) return to_json(value).dump(2) + "\n";
  return to_text(value);
}

template <class T>
std::string emit_report(const T& value, const std::string& format) {
  return emit_report(value, parse_format(format));
}

}  // namespace mkp
