// Copyright (c) 2026, the sgdec authors.
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

#include "sgdec/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <deque>
#include <set>
#include <tuple>

#include "sgdec/errors.hpp"
#include "sgdec/rng.hpp"

namespace sgdec {

namespace {

constexpr int kArchetypes = 6;

struct Signature {
  int subject_group = 0;
  int object_group = 0;
  int archetype = 0;
};

std::string padded_name(const char* prefix, int index, int total) {
  char buf[32];
  if (total >= 100) {
    std::snprintf(buf, sizeof(buf), "%s%03d", prefix, index);
  } else {
    std::snprintf(buf, sizeof(buf), "%s%02d", prefix, index);
  }
  return buf;
}

double draw_range(std::mt19937_64& rng, double lo, double hi) {
  return lo + uniform_real(rng) * (hi - lo);
}

// Integer-pixel box around (cx, cy) with extents (w, h), clipped to the
// image and kept at least one pixel wide.
BoundingBox place_box(double cx, double cy, double w, double h, double image_w,
                      double image_h) {
  double x_t = std::round(std::clamp(cx - w / 2.0, 0.0, image_w - 1.0));
  double y_t = std::round(std::clamp(cy - h / 2.0, 0.0, image_h - 1.0));
  double x_b = std::round(std::clamp(cx + w / 2.0, 1.0, image_w));
  double y_b = std::round(std::clamp(cy + h / 2.0, 1.0, image_h));
  if (x_b <= x_t) x_b = x_t + 1.0;
  if (y_b <= y_t) y_b = y_t + 1.0;
  if (x_b > image_w) {
    x_b = image_w;
    x_t = image_w - 1.0;
  }
  if (y_b > image_h) {
    y_b = image_h;
    y_t = image_h - 1.0;
  }
  return BoundingBox(x_t, y_t, x_b, y_b);
}

BoundingBox random_box(std::mt19937_64& rng, double image_w, double image_h) {
  const double w = draw_range(rng, 0.05, 0.35) * image_w;
  const double h = draw_range(rng, 0.05, 0.35) * image_h;
  const double cx = draw_range(rng, 0.1, 0.9) * image_w;
  const double cy = draw_range(rng, 0.1, 0.9) * image_h;
  return place_box(cx, cy, w, h, image_w, image_h);
}

// Subject and object boxes following one of six relative layouts. Each
// archetype fixes which side tends to be physically smaller, so most
// planted pairs have clearly unequal areas and little overlap; archetype 4
// deliberately stacks two similar boxes on top of each other.
std::pair<BoundingBox, BoundingBox> archetype_boxes(int archetype,
                                                    std::mt19937_64& rng,
                                                    double image_w,
                                                    double image_h) {
  const auto small = [&]() { return draw_range(rng, 0.05, 0.12); };
  const auto large = [&]() { return draw_range(rng, 0.20, 0.35); };
  double sx, sy, sw, sh, ox, oy, ow, oh;
  switch (archetype) {
    case 0:  // small subject above a larger object
      sw = small(), sh = small(), ow = large(), oh = large();
      sx = draw_range(rng, 0.25, 0.75);
      sy = draw_range(rng, 0.10, 0.30);
      ox = sx + draw_range(rng, -0.08, 0.08);
      oy = draw_range(rng, 0.62, 0.85);
      break;
    case 1:  // large subject below a smaller object
      sw = large(), sh = large(), ow = small(), oh = small();
      sx = draw_range(rng, 0.25, 0.75);
      sy = draw_range(rng, 0.62, 0.85);
      ox = sx + draw_range(rng, -0.08, 0.08);
      oy = draw_range(rng, 0.10, 0.30);
      break;
    case 2:  // small subject left of a larger object
      sw = small(), sh = small(), ow = large(), oh = large();
      sy = draw_range(rng, 0.30, 0.70);
      sx = draw_range(rng, 0.08, 0.28);
      ox = draw_range(rng, 0.65, 0.88);
      oy = sy + draw_range(rng, -0.08, 0.08);
      break;
    case 3:  // large subject right of a smaller object
      sw = large(), sh = large(), ow = small(), oh = small();
      sy = draw_range(rng, 0.30, 0.70);
      sx = draw_range(rng, 0.65, 0.88);
      ox = draw_range(rng, 0.08, 0.28);
      oy = sy + draw_range(rng, -0.08, 0.08);
      break;
    case 4:  // two similar boxes stacked with heavy overlap
      sw = draw_range(rng, 0.25, 0.40), sh = draw_range(rng, 0.25, 0.40);
      ow = draw_range(rng, 0.25, 0.40), oh = draw_range(rng, 0.25, 0.40);
      sx = draw_range(rng, 0.35, 0.65);
      sy = draw_range(rng, 0.35, 0.65);
      ox = sx + draw_range(rng, -0.04, 0.04);
      oy = sy + draw_range(rng, -0.04, 0.04);
      break;
    default:  // 5: small subject in the top-left, larger object bottom-right
      sw = small(), sh = small(), ow = draw_range(rng, 0.18, 0.30),
      oh = draw_range(rng, 0.18, 0.30);
      sx = draw_range(rng, 0.06, 0.30);
      sy = draw_range(rng, 0.06, 0.30);
      ox = draw_range(rng, 0.60, 0.90);
      oy = draw_range(rng, 0.60, 0.90);
      break;
  }
  return {place_box(sx * image_w, sy * image_h, sw * image_w, sh * image_h,
                    image_w, image_h),
          place_box(ox * image_w, oy * image_h, ow * image_w, oh * image_h,
                    image_w, image_h)};
}

class ZipfSampler {
 public:
  ZipfSampler(int n, double exponent) {
    cumulative_.reserve(n);
    double total = 0.0;
    for (int k = 1; k <= n; ++k) {
      total += std::pow(static_cast<double>(k), -exponent);
      cumulative_.push_back(total);
    }
    for (double& c : cumulative_) c /= total;
  }

  // Rank in [1, n]; rank 1 is the most frequent.
  int draw(std::mt19937_64& rng) const {
    const double u = uniform_real(rng);
    const auto it = std::lower_bound(cumulative_.begin(), cumulative_.end(), u);
    return static_cast<int>(it - cumulative_.begin()) + 1;
  }

 private:
  std::vector<double> cumulative_;
};

}  // namespace

void SynthConfig::validate() const {
  if (n_train_images < 1 || n_test_images < 1) throw DataError("need images in both splits");
  if (n_object_categories < 1 || n_predicates < 1)
    throw DataError("need at least one category and one predicate");
  if (zipf_exponent < 0.0) throw DataError("zipf exponent must be >= 0");
  if (d_visual < 1 || d_word < 1) throw DataError("feature widths must be positive");
  if (!(image_w > 1.0) || !(image_h > 1.0)) throw DataError("image size too small");
  if (feature_spread < 0.0) throw DataError("feature spread must be >= 0");
  if (geometry_noise < 0.0 || geometry_noise > 1.0)
    throw DataError("geometry noise must lie in [0, 1]");
  if (group_size < 1 || group_size > n_object_categories)
    throw DataError("group size must lie in [1, category count]");
  if (min_instances < 2 || max_instances < min_instances || max_instances > 16)
    throw DataError("instance counts must satisfy 2 <= min <= max <= 16");
  if (holdout_per_predicate < 0 || predicates_with_holdout < 0 ||
      predicates_with_holdout > n_predicates)
    throw DataError("invalid holdout configuration");
  if (holdout_per_predicate > 0 &&
      holdout_per_predicate >= group_size * group_size)
    throw DataError("more held-out combinations requested than exist "
                    "(holdout_per_predicate must be < group_size^2)");
}

SynthResult generate(const SynthConfig& cfg) {
  cfg.validate();
  const int n_obj = cfg.n_object_categories;
  const int n_pred = cfg.n_predicates;
  const int n_groups = (n_obj + cfg.group_size - 1) / cfg.group_size;
  const auto group_of = [&](int category) { return category / cfg.group_size; };
  const auto members_of = [&](int group) {
    std::vector<int> members;
    for (int c = group * cfg.group_size;
         c < std::min(n_obj, (group + 1) * cfg.group_size); ++c)
      members.push_back(c);
    return members;
  };

  SynthResult result;

  CategoryVocab vocab;
  for (int c = 0; c < n_obj; ++c)
    vocab.object_categories.push_back(padded_name("obj", c, n_obj));
  vocab.predicates.push_back("none");
  for (int p = 1; p <= n_pred; ++p)
    vocab.predicates.push_back(padded_name("rel", p, n_pred + 1));

  // Word embeddings share a center per group so same-group categories are
  // mutual nearest neighbors.
  {
    std::mt19937_64 rng(mix_seed(cfg.seed, 10));
    std::vector<std::vector<double>> centers(n_groups, std::vector<double>(cfg.d_word));
    for (auto& center : centers)
      for (double& v : center) v = normal(rng);
    for (int c = 0; c < n_obj; ++c) {
      std::vector<double> vec(cfg.d_word);
      for (int d = 0; d < cfg.d_word; ++d)
        vec[d] = centers[group_of(c)][d] + 0.25 * normal(rng);
      result.embedding_tokens.push_back(vocab.object_categories[c]);
      result.embedding_vectors.push_back(std::move(vec));
    }
  }

  // Visual cluster means, same group structure.
  std::vector<std::vector<double>> visual_means(n_obj,
                                                std::vector<double>(cfg.d_visual));
  {
    std::mt19937_64 rng(mix_seed(cfg.seed, 11));
    std::vector<std::vector<double>> centers(n_groups,
                                             std::vector<double>(cfg.d_visual));
    for (auto& center : centers)
      for (double& v : center) v = normal(rng);
    for (int c = 0; c < n_obj; ++c)
      for (int d = 0; d < cfg.d_visual; ++d)
        visual_means[c][d] = centers[group_of(c)][d] + 0.6 * normal(rng);
  }

  // One distinct (subject group, object group, archetype) tuple per
  // predicate.
  std::vector<Signature> signatures(n_pred + 1);
  {
    std::vector<Signature> tuples;
    for (int gs = 0; gs < n_groups; ++gs)
      for (int go = 0; go < n_groups; ++go)
        for (int a = 0; a < kArchetypes; ++a) tuples.push_back({gs, go, a});
    if (static_cast<int>(tuples.size()) < n_pred)
      throw DataError("not enough distinct signatures for " +
                      std::to_string(n_pred) + " predicates");
    std::mt19937_64 rng(mix_seed(cfg.seed, 12));
    shuffle_vec(tuples, rng);
    for (int p = 1; p <= n_pred; ++p) signatures[p] = tuples[p - 1];
  }

  // Held-out combinations for the rarest predicates.
  std::set<std::tuple<int, int, int>> holdout;
  {
    std::mt19937_64 rng(mix_seed(cfg.seed, 13));
    for (int p = n_pred - cfg.predicates_with_holdout + 1; p <= n_pred; ++p) {
      if (cfg.holdout_per_predicate == 0) break;
      std::vector<std::pair<int, int>> grid;
      for (const int cs : members_of(signatures[p].subject_group))
        for (const int co : members_of(signatures[p].object_group))
          grid.emplace_back(cs, co);
      if (static_cast<int>(grid.size()) <= cfg.holdout_per_predicate)
        throw DataError("more held-out combinations requested than exist for " +
                        vocab.predicates[p]);
      shuffle_vec(grid, rng);
      for (int i = 0; i < cfg.holdout_per_predicate; ++i) {
        holdout.emplace(grid[i].first, p, grid[i].second);
        result.holdout_combos.push_back({grid[i].first, p, grid[i].second});
      }
    }
  }

  const ZipfSampler zipf(n_pred, cfg.zipf_exponent);

  // A queued triple forces a predicate (and optionally an exact category
  // pair) into the next image with a free slot.
  struct Planted {
    int predicate;
    int subject_category = -1;  // -1: draw from the signature groups
    int object_category = -1;
  };

  const auto build_split = [&](int n_images, bool is_train,
                               std::uint64_t stream) {
    std::mt19937_64 rng(mix_seed(cfg.seed, stream));
    std::deque<Planted> queue;
    if (!is_train) {
      for (const auto& combo : result.holdout_combos)
        queue.push_back({combo[1], combo[0], combo[2]});
    }
    for (int round = 0; round < 2; ++round)
      for (int p = 1; p <= n_pred; ++p) queue.push_back({p});

    Dataset ds;
    ds.vocab = vocab;
    for (int i = 1; i <= n_images; ++i) {
      ImageRecord image;
      image.image_id = i;
      image.width = cfg.image_w;
      image.height = cfg.image_h;

      const int n_inst =
          cfg.min_instances +
          static_cast<int>(uniform_index(
              rng, static_cast<std::size_t>(cfg.max_instances - cfg.min_instances + 1)));
      const int n_triples = std::max(1, n_inst / 2);

      int next_slot = 0;
      const auto add_instance = [&](int category, const BoundingBox& box) {
        ObjectInstance inst;
        inst.instance_id = static_cast<std::uint64_t>(i) * 16 + next_slot++;
        inst.image_id = i;
        inst.category = category;
        inst.box = box;
        inst.visual_feature.resize(cfg.d_visual);
        for (int d = 0; d < cfg.d_visual; ++d)
          inst.visual_feature[d] = static_cast<float>(
              visual_means[category][d] + cfg.feature_spread * normal(rng));
        image.instances.push_back(std::move(inst));
        return image.instances.back().instance_id;
      };

      for (int t = 0; t < n_triples; ++t) {
        Planted plant{0};
        if (!queue.empty()) {
          plant = queue.front();
          queue.pop_front();
        } else {
          plant.predicate = zipf.draw(rng);
        }
        const Signature& sig = signatures[plant.predicate];

        int cs = plant.subject_category;
        int co = plant.object_category;
        if (cs < 0) {
          const auto subject_members = members_of(sig.subject_group);
          const auto object_members = members_of(sig.object_group);
          int tries = 0;
          do {
            cs = subject_members[uniform_index(rng, subject_members.size())];
            co = object_members[uniform_index(rng, object_members.size())];
            if (++tries > 200)
              throw DataError("cannot draw a non-held-out combination for " +
                              vocab.predicates[plant.predicate]);
          } while (is_train && holdout.count({cs, plant.predicate, co}) > 0);
        }

        BoundingBox subject_box, object_box;
        if (uniform_real(rng) < cfg.geometry_noise) {
          subject_box = random_box(rng, cfg.image_w, cfg.image_h);
          object_box = random_box(rng, cfg.image_w, cfg.image_h);
        } else {
          std::tie(subject_box, object_box) =
              archetype_boxes(sig.archetype, rng, cfg.image_w, cfg.image_h);
        }

        RelationTriple triple;
        triple.image_id = i;
        triple.subject = add_instance(cs, subject_box);
        triple.object = add_instance(co, object_box);
        triple.predicate = plant.predicate;
        image.triples.push_back(triple);
      }

      for (int extra = 2 * n_triples; extra < n_inst; ++extra)
        add_instance(static_cast<int>(uniform_index(rng, n_obj)),
                     random_box(rng, cfg.image_w, cfg.image_h));

      ds.images.push_back(std::move(image));
    }
    ds.reindex();
    return ds;
  };

  result.train = build_split(cfg.n_train_images, true, 20);
  result.test = build_split(cfg.n_test_images, false, 21);

  const FeatureDims dims{cfg.d_visual, kSpatialDim, cfg.d_word};
  result.train.validate(&dims);
  result.test.validate(&dims);
  return result;
}

}  // namespace sgdec
