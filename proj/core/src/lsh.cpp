#include "robann/lsh.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <map>
#include <stdexcept>

namespace robann {

double rho_value(RhoFn fn, double c) {
  switch (fn) {
    case RhoFn::kBitSampling:
      return 1.0 / c;
    case RhoFn::kHammingOpt:
      return 1.0 / (2.0 * c - 1.0);
    case RhoFn::kL2Opt:
      return 1.0 / (2.0 * c * c - 1.0);
  }
  throw std::logic_error("rho_value: bad enum");
}

const char* rho_fn_name(RhoFn fn) {
  switch (fn) {
    case RhoFn::kBitSampling:
      return "bit_sampling";
    case RhoFn::kHammingOpt:
      return "hamming_opt";
    case RhoFn::kL2Opt:
      return "l2_opt";
  }
  return "?";
}

std::optional<RhoFn> rho_fn_from_name(const std::string& name) {
  if (name == "bit_sampling") return RhoFn::kBitSampling;
  if (name == "hamming_opt") return RhoFn::kHammingOpt;
  if (name == "l2_opt") return RhoFn::kL2Opt;
  return std::nullopt;
}

LshParams derive_params(const ProblemParams& params, std::size_t n,
                        std::size_t dim, double boost, std::uint64_t seed) {
  params.validate();
  if (params.mode != SpaceMode::kHamming) {
    throw std::invalid_argument("derive_params: Hamming mode only");
  }
  const double d = static_cast<double>(dim);
  if (params.cr() > d) {
    throw std::invalid_argument("derive_params: cr > d, p2 would be <= 0");
  }
  LshParams lp;
  lp.seed = seed;
  lp.p1 = 1.0 - params.r / d;
  lp.p2 = 1.0 - params.cr() / d;
  // p2 == 0 (cr == d) degenerates to rho = 0 and k = 1.
  const double log_inv_p1 = -std::log(lp.p1);
  const double log_inv_p2 =
      lp.p2 > 0.0 ? -std::log(lp.p2) : std::numeric_limits<double>::infinity();
  lp.rho = log_inv_p1 / log_inv_p2;

  const double nn = static_cast<double>(std::max<std::size_t>(n, 1));
  const double k_raw = std::ceil(std::log(nn) / log_inv_p2);
  lp.k_concat = static_cast<std::uint32_t>(std::max(1.0, k_raw));
  const double l_raw = std::ceil(std::pow(nn, lp.rho) * std::max(1.0, boost));
  lp.L_tables = static_cast<std::uint32_t>(std::max(1.0, l_raw));
  return lp;
}

AmplifiedLshIndex::AmplifiedLshIndex(std::shared_ptr<Dataset> ds,
                                     ProblemParams params, LshParams lsh)
    : ds_(std::move(ds)), params_(params), lsh_(lsh) {
  if (!ds_) throw std::invalid_argument("AmplifiedLshIndex: null dataset");
  if (ds_->mode() != SpaceMode::kHamming) {
    throw std::invalid_argument("AmplifiedLshIndex: Hamming datasets only");
  }
  build();
}

void AmplifiedLshIndex::build() {
  coords_.assign(lsh_.L_tables, {});
  tables_.assign(lsh_.L_tables, {});
  for (std::uint32_t t = 0; t < lsh_.L_tables; ++t) {
    RngStream rng = derive_stream(lsh_.seed, "lsh-table-coords", t);
    coords_[t].resize(lsh_.k_concat);
    for (auto& c : coords_[t]) {
      c = static_cast<std::uint32_t>(rng.next_below(ds_->dim()));
    }
  }
  ds_->for_each([&](PointId id, const Point&) { index_point(id); });
}

std::string AmplifiedLshIndex::key(std::size_t table, const Point& q) const {
  const auto& idxs = coords_[table];
  std::string out((idxs.size() + 7) / 8, '\0');
  for (std::size_t i = 0; i < idxs.size(); ++i) {
    if (q.bit(idxs[i])) out[i >> 3] |= static_cast<char>(1 << (i & 7));
  }
  return out;
}

const std::vector<PointId>* AmplifiedLshIndex::bucket(
    std::size_t table, const std::string& key) const {
  const auto it = tables_[table].find(key);
  return it == tables_[table].end() ? nullptr : &it->second;
}

std::vector<Candidate> AmplifiedLshIndex::candidates(const Point& q) const {
  ds_->check_compatible(q);
  std::unordered_map<PointId, std::uint32_t> counts;
  for (std::uint32_t t = 0; t < lsh_.L_tables; ++t) {
    if (const auto* b = bucket(t, key(t, q))) {
      for (const PointId id : *b) ++counts[id];
    }
  }
  std::vector<Candidate> out;
  out.reserve(counts.size());
  for (const auto& [id, cnt] : counts) out.push_back({id, cnt});
  std::sort(out.begin(), out.end(),
            [](const Candidate& a, const Candidate& b) { return a.id < b.id; });
  return out;
}

std::optional<PointId> AmplifiedLshIndex::classic_query(const Point& q) const {
  ds_->check_compatible(q);
  const double cr = params_.cr();
  for (std::uint32_t t = 0; t < lsh_.L_tables; ++t) {
    if (const auto* b = bucket(t, key(t, q))) {
      for (const PointId id : *b) {
        if (distance(ds_->point(id), q) <= cr) return id;
      }
    }
  }
  return std::nullopt;
}

bool AmplifiedLshIndex::weak_decide(const Point& q) const {
  return classic_query(q).has_value();
}

PointId AmplifiedLshIndex::insert(const Point& pt) {
  const PointId id = ds_->append(pt);
  index_point(id);
  return id;
}

void AmplifiedLshIndex::erase(PointId id) {
  if (!ds_->alive(id)) {
    throw std::invalid_argument("AmplifiedLshIndex::erase: dead id");
  }
  unindex_point(id);
  ds_->erase(id);
}

void AmplifiedLshIndex::index_point(PointId id) {
  const Point& pt = ds_->point(id);
  for (std::uint32_t t = 0; t < lsh_.L_tables; ++t) {
    tables_[t][key(t, pt)].push_back(id);
  }
}

void AmplifiedLshIndex::unindex_point(PointId id) {
  const Point& pt = ds_->point(id);
  for (std::uint32_t t = 0; t < lsh_.L_tables; ++t) {
    const std::string k = key(t, pt);
    auto it = tables_[t].find(k);
    if (it == tables_[t].end()) continue;
    auto& vec = it->second;
    vec.erase(std::remove(vec.begin(), vec.end(), id), vec.end());
    if (vec.empty()) tables_[t].erase(it);
  }
}

namespace {

constexpr std::uint32_t kIndexMagic = 0x52414e4e;  // "RANN"
constexpr std::uint32_t kIndexVersion = 1;

template <typename T>
void put(std::string& out, const T& v) {
  const char* raw = reinterpret_cast<const char*>(&v);
  out.append(raw, sizeof(T));
}

void put_str(std::string& out, const std::string& s) {
  put<std::uint64_t>(out, s.size());
  out += s;
}

template <typename T>
T get(const std::string& in, std::size_t& pos) {
  if (pos + sizeof(T) > in.size()) {
    throw std::runtime_error("index blob: truncated");
  }
  T v;
  std::memcpy(&v, in.data() + pos, sizeof(T));
  pos += sizeof(T);
  return v;
}

std::string get_str(const std::string& in, std::size_t& pos) {
  const auto len = get<std::uint64_t>(in, pos);
  if (pos + len > in.size()) throw std::runtime_error("index blob: truncated");
  std::string s = in.substr(pos, len);
  pos += len;
  return s;
}

}  // namespace

std::string AmplifiedLshIndex::serialize() const {
  std::string out;
  put(out, kIndexMagic);
  put(out, kIndexVersion);
  put(out, params_.c);
  put(out, params_.r);
  put(out, params_.max_queries);
  put(out, params_.delta);
  put(out, static_cast<std::uint32_t>(params_.mode));
  put(out, params_.p);
  put(out, lsh_.k_concat);
  put(out, lsh_.L_tables);
  put(out, lsh_.p1);
  put(out, lsh_.p2);
  put(out, lsh_.rho);
  put(out, lsh_.seed);
  for (std::uint32_t t = 0; t < lsh_.L_tables; ++t) {
    for (const auto c : coords_[t]) put(out, c);
    // sorted bucket keys keep the blob independent of hash-map layout
    std::map<std::string, const std::vector<PointId>*> ordered;
    for (const auto& [k, ids] : tables_[t]) ordered.emplace(k, &ids);
    put<std::uint64_t>(out, ordered.size());
    for (const auto& [k, ids] : ordered) {
      put_str(out, k);
      put<std::uint64_t>(out, ids->size());
      for (const PointId id : *ids) put(out, id);
    }
  }
  return out;
}

AmplifiedLshIndex AmplifiedLshIndex::deserialize(std::shared_ptr<Dataset> ds,
                                                 const std::string& blob) {
  std::size_t pos = 0;
  if (get<std::uint32_t>(blob, pos) != kIndexMagic) {
    throw std::runtime_error("index blob: bad magic");
  }
  if (get<std::uint32_t>(blob, pos) != kIndexVersion) {
    throw std::runtime_error("index blob: unsupported version");
  }
  AmplifiedLshIndex idx;
  idx.ds_ = std::move(ds);
  idx.params_.c = get<double>(blob, pos);
  idx.params_.r = get<double>(blob, pos);
  idx.params_.max_queries = get<std::uint64_t>(blob, pos);
  idx.params_.delta = get<double>(blob, pos);
  idx.params_.mode = static_cast<SpaceMode>(get<std::uint32_t>(blob, pos));
  idx.params_.p = get<double>(blob, pos);
  idx.lsh_.k_concat = get<std::uint32_t>(blob, pos);
  idx.lsh_.L_tables = get<std::uint32_t>(blob, pos);
  idx.lsh_.p1 = get<double>(blob, pos);
  idx.lsh_.p2 = get<double>(blob, pos);
  idx.lsh_.rho = get<double>(blob, pos);
  idx.lsh_.seed = get<std::uint64_t>(blob, pos);
  idx.coords_.assign(idx.lsh_.L_tables, {});
  idx.tables_.assign(idx.lsh_.L_tables, {});
  for (std::uint32_t t = 0; t < idx.lsh_.L_tables; ++t) {
    idx.coords_[t].resize(idx.lsh_.k_concat);
    for (auto& c : idx.coords_[t]) c = get<std::uint32_t>(blob, pos);
    const auto buckets = get<std::uint64_t>(blob, pos);
    for (std::uint64_t b = 0; b < buckets; ++b) {
      std::string k = get_str(blob, pos);
      const auto count = get<std::uint64_t>(blob, pos);
      auto& vec = idx.tables_[t][k];
      vec.resize(count);
      for (auto& id : vec) id = get<PointId>(blob, pos);
    }
  }
  if (pos != blob.size()) throw std::runtime_error("index blob: trailing data");
  return idx;
}

}  // namespace robann
