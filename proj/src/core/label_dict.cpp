#include "embisim/core/label_dict.hpp"

#include <fstream>
#include <limits>

#include "embisim/core/bytes.hpp"

namespace embisim {

LabelDictionary LabelDictionary::from_labels(const std::set<std::string, std::less<>>& labels) {
  LabelDictionary d;
  for (const auto& l : labels) d.intern(l);
  return d;
}

std::optional<LabelId> LabelDictionary::find(std::string_view label) const {
  auto it = ids_.find(label);
  if (it == ids_.end()) return std::nullopt;
  return it->second;
}

LabelId LabelDictionary::at(std::string_view label) const {
  if (auto id = find(label)) return *id;
  throw InputError("unknown label '" + std::string(label) + "'");
}

const std::string& LabelDictionary::name(LabelId id) const {
  if (id.value >= names_.size()) {
    throw InputError("label id " + std::to_string(id.value) + " out of range");
  }
  return names_[id.value];
}

LabelId LabelDictionary::intern(std::string_view label) {
  if (auto id = find(label)) return *id;
  if (names_.size() >= std::numeric_limits<std::uint32_t>::max()) {
    throw InputError("label dictionary full");
  }
  const LabelId id{static_cast<std::uint32_t>(names_.size())};
  names_.emplace_back(label);
  ids_.emplace(std::string(label), id);
  return id;
}

void LabelDictionary::save(const std::filesystem::path& path) const {
  std::string buf;
  append_le<std::uint32_t>(buf, static_cast<std::uint32_t>(names_.size()));
  for (const auto& n : names_) {
    append_le<std::uint32_t>(buf, static_cast<std::uint32_t>(n.size()));
    buf += n;
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  if (!out) throw IoError("cannot write label dictionary " + path.string());
}

LabelDictionary LabelDictionary::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open label dictionary " + path.string());
  std::string buf((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  auto bytes = as_bytes(buf);
  auto need = [&](std::size_t pos, std::size_t n) {
    if (pos + n > bytes.size()) throw IoError("truncated label dictionary " + path.string());
  };
  need(0, 4);
  const auto count = load_le<std::uint32_t>(bytes.data());
  std::size_t pos = 4;
  LabelDictionary d;
  for (std::uint32_t i = 0; i < count; ++i) {
    need(pos, 4);
    const auto len = load_le<std::uint32_t>(bytes.data() + pos);
    pos += 4;
    need(pos, len);
    d.intern(std::string_view(buf.data() + pos, len));
    pos += len;
  }
  return d;
}

}  // namespace embisim
