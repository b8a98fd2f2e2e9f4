#include "embisim/core/signature.hpp"

#include <algorithm>
#include <sstream>

#include "embisim/core/bytes.hpp"

namespace embisim {

Signature Signature::from_sorted(PartitionId pid0, std::vector<SignaturePair> pairs) {
  for (std::size_t i = 1; i < pairs.size(); ++i) {
    if (!(pairs[i - 1] < pairs[i])) {
      throw InputError("signature pairs are not strictly ascending");
    }
  }
  Signature s;
  s.pid0_ = pid0;
  s.pairs_ = std::move(pairs);
  return s;
}

Signature make_signature(PartitionId pid0, std::vector<SignaturePair> raw_pairs) {
  std::sort(raw_pairs.begin(), raw_pairs.end());
  raw_pairs.erase(std::unique(raw_pairs.begin(), raw_pairs.end()), raw_pairs.end());
  Signature s;
  s.pid0_ = pid0;
  s.pairs_ = std::move(raw_pairs);
  return s;
}

void append_canonical_bytes(const Signature& sig, std::string& out) {
  out.reserve(out.size() + canonical_size(sig.pairs().size()));
  append_le<std::uint64_t>(out, sig.pid0().value);
  append_le<std::uint64_t>(out, sig.pairs().size());
  for (const auto& p : sig.pairs()) {
    append_le<std::uint32_t>(out, p.label.value);
    append_le<std::uint64_t>(out, p.child.value);
  }
}

std::string canonical_bytes(const Signature& sig) {
  std::string out;
  append_canonical_bytes(sig, out);
  return out;
}

Signature parse_canonical_bytes(std::span<const std::byte> bytes) {
  if (bytes.size() < 16) throw InputError("canonical signature truncated");
  const auto pid0 = PartitionId{load_le<std::uint64_t>(bytes.data())};
  const auto n = load_le<std::uint64_t>(bytes.data() + 8);
  if ((bytes.size() - 16) / 12 < n || bytes.size() != canonical_size(n)) {
    throw InputError("canonical signature has inconsistent length");
  }
  std::vector<SignaturePair> pairs;
  pairs.reserve(n);
  const std::byte* p = bytes.data() + 16;
  for (std::uint64_t i = 0; i < n; ++i, p += 12) {
    pairs.push_back({LabelId{load_le<std::uint32_t>(p)}, PartitionId{load_le<std::uint64_t>(p + 4)}});
  }
  return Signature::from_sorted(pid0, std::move(pairs));
}

std::string to_string(const Signature& sig) {
  std::ostringstream os;
  os << sig.pid0() << ",{";
  for (std::size_t i = 0; i < sig.pairs().size(); ++i) {
    if (i) os << ',';
    os << '(' << sig.pairs()[i].label << ',' << sig.pairs()[i].child << ')';
  }
  os << '}';
  return os.str();
}

}  // namespace embisim
