// Copyright 2026 The supkit Authors
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

#include "sup/action_scorer.hpp"

#include <algorithm>
#include <array>
#include <set>
#include <stdexcept>

#include "sup/errors.hpp"

namespace sup::actions
{

void ScoreWeights::validate() const
{
  if (!(s_matching > 0.0)) {
    throw std::invalid_argument("s_matching must be > 0");
  }
  if (!(p_missing >= 0.0 && p_redundant >= 0.0 && p_missing_conservative >= 0.0 &&
    p_redundant_conservative >= 0.0))
  {
    throw std::invalid_argument("penalties must be >= 0");
  }
}

const char * to_string(Step step)
{
  switch (step) {
    case Step::missing: return "missing";
    case Step::redundant: return "redundant";
    case Step::matching: return "matching";
    default: return "none";
  }
}

namespace
{

// Vocabulary indices of a sequence; short sequences stay off the heap.
class TokenIds
{
public:
  TokenIds(std::span<const MetaAction> seq, const char * which, const Taxonomy & taxonomy)
  {
    if (seq.empty()) {
      throw SchemaError(std::string(which) + " sequence is empty");
    }
    if (seq.size() > local_.size()) {
      heap_.resize(seq.size());
    }
    int * out = data();
    for (std::size_t i = 0; i < seq.size(); ++i) {
      out[i] = taxonomy.index_of(seq[i].token);
      if (out[i] < 0) {
        throw SchemaError(
          std::string(which) + ": unknown meta-action token '" + seq[i].token + "'");
      }
    }
  }

  int operator[](std::size_t i) const {return heap_.empty() ? local_[i] : heap_[i];}

private:
  int * data() {return heap_.empty() ? local_.data() : heap_.data();}

  std::array<int, 16> local_{};
  std::vector<int> heap_;
};

}  // namespace

AlignmentResult align(
  std::span<const MetaAction> reference, std::span<const MetaAction> candidate,
  const ScoreWeights & w, const Taxonomy & taxonomy)
{
  const TokenIds ref_ids(reference, "reference", taxonomy);
  const TokenIds cand_ids(candidate, "candidate", taxonomy);

  AlignmentResult res;
  res.rows = reference.size() + 1;
  res.cols = candidate.size() + 1;
  res.cells.resize(res.rows * res.cols);
  auto S = [&](std::size_t r, std::size_t c) -> double & {
      return res.cells[r * res.cols + c].score;
    };
  auto B = [&](std::size_t r, std::size_t c) -> Step & {return res.cells[r * res.cols + c].step;};

  for (std::size_t r = 1; r < res.rows; ++r) {
    S(r, 0) = S(r - 1, 0) - w.missing_penalty(reference[r - 1]);
    B(r, 0) = Step::missing;
  }
  for (std::size_t c = 1; c < res.cols; ++c) {
    S(0, c) = S(0, c - 1) - w.redundant_penalty(candidate[c - 1]);
    B(0, c) = Step::redundant;
  }
  for (std::size_t r = 1; r < res.rows; ++r) {
    for (std::size_t c = 1; c < res.cols; ++c) {
      double best = S(r - 1, c) - w.missing_penalty(reference[r - 1]);
      Step step = Step::missing;
      if (ref_ids[r - 1] == cand_ids[c - 1]) {
        const double m = S(r - 1, c - 1) + w.s_matching;
        if (m >= best) {
          best = m;
          step = Step::matching;
        }
      }
      const double red = S(r, c - 1) - w.redundant_penalty(candidate[c - 1]);
      if (red > best) {
        best = red;
        step = Step::redundant;
      }
      S(r, c) = best;
      B(r, c) = step;
    }
  }
  res.raw_score = S(res.rows - 1, res.cols - 1);
  res.normalized_score = res.raw_score / static_cast<double>(reference.size());
  return res;
}

std::vector<Step> AlignmentResult::path() const
{
  std::vector<Step> steps;
  std::size_t r = rows - 1;
  std::size_t c = cols - 1;
  while (r > 0 || c > 0) {
    const Step s = step_at(r, c);
    steps.push_back(s);
    switch (s) {
      case Step::matching: --r; --c; break;
      case Step::missing: --r; break;
      case Step::redundant: --c; break;
      default: throw std::logic_error("corrupt backtrace");
    }
  }
  std::reverse(steps.begin(), steps.end());
  return steps;
}

double replay(
  std::span<const MetaAction> reference, std::span<const MetaAction> candidate,
  std::span<const Step> steps, const ScoreWeights & w)
{
  std::size_t r = 0;
  std::size_t c = 0;
  double total = 0.0;
  for (Step s : steps) {
    switch (s) {
      case Step::matching:
        if (r >= reference.size() || c >= candidate.size() ||
          reference[r].token != candidate[c].token)
        {
          throw std::invalid_argument("matching step on unequal tokens");
        }
        total += w.s_matching;
        ++r;
        ++c;
        break;
      case Step::missing:
        if (r >= reference.size()) {
          throw std::invalid_argument("missing step past the reference end");
        }
        total -= w.missing_penalty(reference[r++]);
        break;
      case Step::redundant:
        if (c >= candidate.size()) {
          throw std::invalid_argument("redundant step past the candidate end");
        }
        total -= w.redundant_penalty(candidate[c++]);
        break;
      default:
        throw std::invalid_argument("invalid step");
    }
  }
  if (r != reference.size() || c != candidate.size()) {
    throw std::invalid_argument("alignment does not consume both sequences");
  }
  return total;
}

BestScore score_with_alternatives(
  std::span<const MetaActionSequence> references, std::span<const MetaAction> candidate,
  const ScoreWeights & weights, const Taxonomy & taxonomy)
{
  if (references.empty()) {
    throw SchemaError("at least one reference sequence is required");
  }
  BestScore best;
  for (std::size_t i = 0; i < references.size(); ++i) {
    const auto res = align(references[i], candidate, weights, taxonomy);
    if (i == 0 || res.normalized_score > best.normalized_score) {
      best = {res.normalized_score, i, res.raw_score};
    }
  }
  return best;
}

const SubstitutionTable & default_substitutions()
{
  static const SubstitutionTable table = [] {
      const std::vector<std::pair<std::string, std::string>> pairs{
        {"Slow down", "Slow down rapidly"},
        {"Speed up", "Speed up rapidly"},
        {"Shift slightly to the right", "Change lane to the right"},
        {"Shift slightly to the left", "Change lane to the left"},
        {"Go straight at a constant speed", "Go straight slowly"},
      };
      SubstitutionTable t;
      for (const auto & [a, b] : pairs) {
        t[a].push_back(b);
        t[b].push_back(a);
      }
      return t;
    }();
  return table;
}

SubstitutionTable substitutions_from_json(const io::Json & doc, const Taxonomy & taxonomy)
{
  if (!doc.is_object()) {
    throw SchemaError("substitutions: expected an object of token -> [tokens]");
  }
  SubstitutionTable t;
  for (auto it = doc.begin(); it != doc.end(); ++it) {
    const std::string key = make_action(it.key(), taxonomy).token;
    if (!it.value().is_array()) {
      throw SchemaError("substitutions." + it.key() + ": expected an array");
    }
    for (const auto & v : it.value()) {
      if (!v.is_string()) {
        throw SchemaError("substitutions." + it.key() + ": expected strings");
      }
      t[key].push_back(make_action(v.get<std::string>(), taxonomy).token);
    }
  }
  return t;
}

std::vector<MetaActionSequence> generate_alternatives(
  std::span<const MetaAction> reference, const SubstitutionTable & table, std::size_t limit,
  const Taxonomy & taxonomy)
{
  std::vector<std::vector<MetaAction>> choices;
  choices.reserve(reference.size());
  for (const auto & a : reference) {
    std::vector<MetaAction> opts{a};
    if (auto it = table.find(a.token); it != table.end()) {
      for (const auto & syn : it->second) {
        MetaAction alt = make_action(syn, taxonomy);
        if (std::find(opts.begin(), opts.end(), alt) == opts.end()) {
          opts.push_back(std::move(alt));
        }
      }
    }
    choices.push_back(std::move(opts));
  }

  std::vector<MetaActionSequence> out;
  std::set<std::vector<std::string>> seen;
  std::vector<std::size_t> pick(reference.size(), 0);
  const MetaActionSequence ref(reference.begin(), reference.end());
  while (out.size() < limit) {
    // Advance the odometer; the all-zero pick is the reference itself.
    std::size_t pos = pick.size();
    while (pos > 0) {
      --pos;
      if (++pick[pos] < choices[pos].size()) {
        break;
      }
      pick[pos] = 0;
      if (pos == 0) {
        return out;
      }
    }
    if (pick.empty()) {
      return out;
    }
    MetaActionSequence seq;
    std::vector<std::string> key;
    for (std::size_t i = 0; i < pick.size(); ++i) {
      seq.push_back(choices[i][pick[i]]);
      key.push_back(seq.back().token);
    }
    if (seq != ref && seen.insert(key).second) {
      out.push_back(std::move(seq));
    }
  }
  return out;
}

}  // namespace sup::actions
