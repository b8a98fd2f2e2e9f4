#include "embisim/em/var_file.hpp"

#include <algorithm>
#include <cstring>

#include "embisim/core/bytes.hpp"
#include "embisim/core/types.hpp"

namespace embisim::em {

VarWriter::VarWriter(Workspace& ws, std::filesystem::path path, Traffic traffic, std::size_t buffer_bytes)
    : ws_(&ws), traffic_(traffic), file_(std::move(path), File::Mode::write_truncate) {
  if (buffer_bytes == 0) buffer_bytes = ws.stream_buffer_bytes();
  buffer_.resize(std::max<std::size_t>(buffer_bytes, 64));
}

VarWriter::~VarWriter() {
  if (!finished_ && file_.is_open()) {
    auto p = file_.path();
    try {
      file_.close();
    } catch (...) {
    }
    remove_quietly(p);
  }
}

void VarWriter::flush() {
  if (fill_ == 0) return;
  file_.write_at(buffer_.data(), fill_, offset_);
  ws_->io().charge_write(traffic_, fill_);
  offset_ += fill_;
  fill_ = 0;
}

void VarWriter::put(const std::byte* p, std::size_t n) {
  while (n > 0) {
    if (fill_ == buffer_.size()) flush();
    const std::size_t take = std::min(n, buffer_.size() - fill_);
    std::memcpy(buffer_.data() + fill_, p, take);
    fill_ += take;
    p += take;
    n -= take;
  }
}

std::uint64_t VarWriter::push(std::string_view rec) {
  if (rec.size() > UINT32_MAX) throw InputError("variable-length record exceeds 4 GiB");
  const std::uint64_t at = offset();
  std::byte len[4];
  store_le(len, static_cast<std::uint32_t>(rec.size()));
  put(len, 4);
  put(reinterpret_cast<const std::byte*>(rec.data()), rec.size());
  ++count_;
  return at;
}

VarFile VarWriter::finish() {
  flush();
  VarFile f{file_.path(), count_, offset_};
  file_.close();
  finished_ = true;
  return f;
}

VarReader::VarReader(Workspace& ws, const VarFile& f, Traffic traffic, std::size_t buffer_bytes,
                     std::uint64_t begin, std::uint64_t end)
    : ws_(&ws), traffic_(traffic), file_(nullptr), pos_(begin), file_pos_(begin),
      end_(std::min(end, f.byte_size)) {
  if (pos_ < end_) own_ = std::make_unique<File>(f.path, File::Mode::read);
  file_ = own_.get();
  if (buffer_bytes == 0) buffer_bytes = ws.stream_buffer_bytes();
  buffer_.resize(std::max<std::size_t>(buffer_bytes, 16));
}

VarReader::VarReader(Workspace& ws, const File& shared, Traffic traffic, std::size_t buffer_bytes,
                     std::uint64_t begin, std::uint64_t end)
    : ws_(&ws), traffic_(traffic), file_(&shared), pos_(begin), file_pos_(begin), end_(end) {
  buffer_.resize(std::max<std::size_t>(buffer_bytes, 16));
}

void VarReader::take(std::byte* dst, std::size_t n) {
  while (n > 0) {
    if (buf_pos_ == buf_len_) {
      const std::size_t want = static_cast<std::size_t>(std::min<std::uint64_t>(buffer_.size(), end_ - file_pos_));
      if (want == 0) throw IoError("truncated record in '" + file_->path().string() + "'");
      const std::size_t got = file_->read_at(buffer_.data(), want, file_pos_);
      if (got != want) throw IoError("short read on '" + file_->path().string() + "'");
      ws_->io().charge_read(traffic_, got);
      file_pos_ += got;
      buf_pos_ = 0;
      buf_len_ = got;
    }
    const std::size_t t = std::min(n, buf_len_ - buf_pos_);
    std::memcpy(dst, buffer_.data() + buf_pos_, t);
    buf_pos_ += t;
    dst += t;
    n -= t;
  }
}

bool VarReader::next(std::string& out) {
  if (pos_ >= end_) return false;
  std::byte len[4];
  take(len, 4);
  const auto n = load_le<std::uint32_t>(len);
  out.resize(n);
  take(reinterpret_cast<std::byte*>(out.data()), n);
  pos_ += 4 + n;
  return true;
}

VarSorter::VarSorter(Workspace& ws, Less less, Options opts) : ws_(&ws), less_(less), opts_(std::move(opts)) {
  if (opts_.memory_bytes == 0) opts_.memory_bytes = ws.budget().table_buffer_bytes;
  if (opts_.fan_in < 2) opts_.fan_in = std::max<std::uint64_t>(2, ws.budget().table_pages() - 1);
  if (opts_.output.empty()) opts_.output = ws.temp_path("varsorted");
}

VarSorter::~VarSorter() = default;

void VarSorter::push(std::string rec) {
  if (run_bytes_ >= opts_.memory_bytes) spill();
  run_bytes_ += rec.size() + 4;
  run_.push_back(std::move(rec));
  ++pushed_;
}

void VarSorter::spill() {
  if (run_.empty()) return;
  std::stable_sort(run_.begin(), run_.end(), [this](const std::string& a, const std::string& b) {
    return less_(a, b);
  });
  if (!writer_) writer_ = std::make_unique<VarWriter>(*ws_, ws_->temp_path("varruns"), opts_.traffic);
  const std::uint64_t begin = writer_->offset();
  for (const auto& r : run_) writer_->push(r);
  runs_.push_back({begin, writer_->offset()});
  run_.clear();
  run_bytes_ = 0;
}

VarFile VarSorter::finish() {
  if (runs_.empty()) {
    std::stable_sort(run_.begin(), run_.end(), [this](const std::string& a, const std::string& b) {
      return less_(a, b);
    });
    VarWriter out(*ws_, opts_.output, opts_.traffic);
    for (const auto& r : run_) out.push(r);
    run_.clear();
    run_.shrink_to_fit();
    return out.finish();
  }
  spill();
  run_.shrink_to_fit();
  while (runs_.size() > 1) merge_pass();
  if (writer_) {
    // A single spilled run and nothing else: it is already the answer.
    VarFile f = writer_->finish();
    writer_.reset();
    std::error_code ec;
    std::filesystem::rename(f.path, opts_.output, ec);
    if (ec) throw IoError("cannot move sort output to '" + opts_.output.string() + "': " + ec.message());
    f.path = opts_.output;
    return f;
  }
  return result_;
}

void VarSorter::merge_pass() {
  const VarFile input = writer_->finish();
  writer_.reset();
  const std::vector<Span> spans = std::move(runs_);
  runs_.clear();
  const bool final_pass = spans.size() <= opts_.fan_in;
  auto out = std::make_unique<VarWriter>(*ws_, final_pass ? opts_.output : ws_->temp_path("varruns"),
                                         opts_.traffic, ws_->budget().page_size);
  File in(input.path, File::Mode::read);
  for (std::size_t g = 0; g < spans.size(); g += opts_.fan_in) {
    const std::size_t group = std::min<std::size_t>(opts_.fan_in, spans.size() - g);
    const std::uint64_t per =
        std::max<std::uint64_t>(ws_->budget().page_size, opts_.memory_bytes / (group + 1));
    std::vector<VarReader> readers;
    std::vector<std::string> heads(group);
    std::vector<std::size_t> heap;
    readers.reserve(group);
    for (std::size_t i = 0; i < group; ++i) {
      readers.emplace_back(*ws_, in, opts_.traffic, static_cast<std::size_t>(per), spans[g + i].begin,
                           spans[g + i].end);
      if (readers[i].next(heads[i])) heap.push_back(i);
    }
    auto heap_less = [&](std::size_t a, std::size_t b) {
      if (less_(heads[b], heads[a])) return true;
      if (less_(heads[a], heads[b])) return false;
      return b < a;
    };
    std::make_heap(heap.begin(), heap.end(), heap_less);
    const std::uint64_t begin = out->offset();
    while (!heap.empty()) {
      std::pop_heap(heap.begin(), heap.end(), heap_less);
      const std::size_t i = heap.back();
      out->push(heads[i]);
      if (readers[i].next(heads[i])) {
        std::push_heap(heap.begin(), heap.end(), heap_less);
      } else {
        heap.pop_back();
      }
    }
    runs_.push_back({begin, out->offset()});
  }
  in.close();
  remove_quietly(input.path);
  if (final_pass) {
    result_ = out->finish();
  } else {
    writer_ = std::move(out);
  }
}

}  // namespace embisim::em
