#include "eed/features.hpp"

#include "eed/text.hpp"

namespace eed {

namespace {

constexpr int kWindow = 2;

std::string offset_tag(int off) {
  std::string s = "[";
  s += std::to_string(off);
  s += "]=";
  return s;
}

const std::string& channel_value(const std::vector<std::string>& channel, size_t t,
                                 std::string& scratch) {
  static const std::string absent = kAbsentValue;
  if (t >= channel.size() || channel[t].empty()) return absent;
  scratch = channel[t];
  return scratch;
}

}  // namespace

std::string FeatureTemplateSet::description() const {
  std::string d = "w2:surface,ctype";
  if (use_pos) d += ",pos";
  if (use_ne) d += ",ne";
  if (use_cluster) {
    d += ",cluster(";
    for (size_t i = 0; i < cluster_prefix_lengths.size(); ++i) {
      if (i) d += '/';
      d += cluster_prefix_lengths[i] == 0 ? "full" : std::to_string(cluster_prefix_lengths[i]);
    }
    d += ')';
  }
  return d;
}

std::vector<std::string> extract_features(std::span<const std::string> tokens,
                                          const TokenAnnotations& annotations, size_t t,
                                          const FeatureTemplateSet& templates) {
  std::vector<std::string> feats;
  const int n = static_cast<int>(tokens.size());
  std::string scratch;
  for (int off = -kWindow; off <= kWindow; ++off) {
    const int i = static_cast<int>(t) + off;
    const bool in_bounds = i >= 0 && i < n;
    const char* sentinel = i < 0 ? "BOS" : "EOS";
    const std::string tag = offset_tag(off);

    if (in_bounds) {
      const size_t ui = static_cast<size_t>(i);
      feats.push_back("w" + tag + tokens[ui]);
      feats.push_back("ct" + tag + char_type_signature(tokens[ui]));
      if (templates.use_pos)
        feats.push_back("p" + tag + channel_value(annotations.pos, ui, scratch));
      if (templates.use_ne)
        feats.push_back("ne" + tag + channel_value(annotations.ne, ui, scratch));
      if (templates.use_cluster) {
        const std::string& bits = channel_value(annotations.cluster_bits, ui, scratch);
        for (int len : templates.cluster_prefix_lengths) {
          const std::string name = "c" + (len == 0 ? std::string("F") : std::to_string(len));
          if (bits == kAbsentValue) {
            feats.push_back(name + tag + kAbsentValue);
          } else {
            const size_t keep = len == 0 ? bits.size() : std::min<size_t>(len, bits.size());
            feats.push_back(name + tag + bits.substr(0, keep));
          }
        }
      }
    } else {
      feats.push_back("w" + tag + sentinel);
      feats.push_back("ct" + tag + sentinel);
      if (templates.use_pos) feats.push_back("p" + tag + sentinel);
      if (templates.use_ne) feats.push_back("ne" + tag + sentinel);
      if (templates.use_cluster) {
        for (int len : templates.cluster_prefix_lengths) {
          const std::string name = "c" + (len == 0 ? std::string("F") : std::to_string(len));
          feats.push_back(name + tag + sentinel);
        }
      }
    }
  }
  return feats;
}

}  // namespace eed
