// src/pfile-io.cc

// Copyright 2026  The pdnn-cpp Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#include "pdnn/pfile-io.h"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <limits>

#include "byte-io.h"
#include "pdnn/errors.h"

namespace pdnn {

namespace {

using internal::GetF32;
using internal::GetLe;
using internal::PutF32;
using internal::PutLe;

std::vector<std::string_view> Split(std::string_view s, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    std::size_t pos = s.find(sep, start);
    if (pos == std::string_view::npos) {
      parts.push_back(s.substr(start));
      return parts;
    }
    parts.push_back(s.substr(start, pos - start));
    start = pos + 1;
  }
}

std::uint64_t ParseByteCount(std::string_view text, std::size_t position) {
  if (text.empty()) throw ParseError("empty partition size", position);
  std::uint64_t multiplier = 1;
  char last = static_cast<char>(std::tolower(static_cast<unsigned char>(text.back())));
  if (last == 'k' || last == 'm' || last == 'g') {
    multiplier = last == 'k' ? (1ULL << 10) : last == 'm' ? (1ULL << 20) : (1ULL << 30);
    text.remove_suffix(1);
  }
  std::uint64_t value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size() || text.empty())
    throw ParseError("malformed partition size '" + std::string(text) + "'", position);
  if (value == 0) throw ParseError("partition size must be positive", position);
  if (value > std::numeric_limits<std::uint64_t>::max() / multiplier)
    throw ParseError("partition size overflows", position);
  return value * multiplier;
}

bool ParseFlag(std::string_view key, std::string_view text, std::size_t position) {
  if (text == "true" || text == "1") return true;
  if (text == "false" || text == "0") return false;
  throw ParseError("non-boolean value '" + std::string(text) + "' for " + std::string(key),
                   position);
}

void EncodeHeader(const PFileHeader &h, std::string *out) {
  out->append(PFileHeader::kMagic);
  PutLe(out, h.version);
  PutLe(out, h.feature_dim);
  PutLe(out, h.num_utterances);
  PutLe(out, h.num_frames);
  PutLe(out, static_cast<std::uint8_t>(h.label_present ? 1 : 0));
}

void EncodeRecord(const FrameRecord &r, bool with_label, std::string *out) {
  PutLe(out, r.utt_index);
  PutLe(out, r.frame_index);
  for (double v : r.features) PutF32(out, static_cast<float>(v));
  if (with_label) PutLe(out, r.label);
}

FrameRecord DecodeRecord(const char *p, const PFileHeader &h) {
  FrameRecord r;
  r.utt_index = GetLe<std::uint32_t>(p);
  r.frame_index = GetLe<std::uint32_t>(p + 4);
  r.features.resize(h.feature_dim);
  for (std::uint32_t k = 0; k < h.feature_dim; k++)
    r.features[k] = static_cast<double>(GetF32(p + 8 + 4 * k));
  if (h.label_present) r.label = GetLe<std::uint32_t>(p + 8 + 4 * h.feature_dim);
  return r;
}

// Header fields from the first PFileHeader::kBytes bytes plus the total
// file length; checks everything except the record payload.
PFileHeader DecodeHeader(std::string_view head, std::uint64_t file_bytes) {
  if (head.size() < PFileHeader::kBytes)
    throw CorruptArchiveError("truncated PFile header", head.size());
  if (head.substr(0, 4) != PFileHeader::kMagic)
    throw CorruptArchiveError("bad PFile magic", 0);
  PFileHeader h;
  h.version = GetLe<std::uint32_t>(head.data() + 4);
  if (h.version != PFileHeader::kVersion)
    throw CorruptArchiveError("unsupported PFile version " + std::to_string(h.version), 4);
  h.feature_dim = GetLe<std::uint32_t>(head.data() + 8);
  h.num_utterances = GetLe<std::uint64_t>(head.data() + 12);
  h.num_frames = GetLe<std::uint64_t>(head.data() + 20);
  std::uint8_t flag = static_cast<std::uint8_t>(head[28]);
  if (flag > 1) throw CorruptArchiveError("bad label flag", 28);
  h.label_present = flag == 1;
  if (h.num_utterances > h.num_frames || (h.num_frames > 0 && h.num_utterances == 0))
    throw CorruptArchiveError("utterance count inconsistent with frame count", 12);

  const std::uint64_t rec = h.RecordBytes();
  if (h.num_frames > (std::numeric_limits<std::uint64_t>::max() - PFileHeader::kBytes) / rec)
    throw CorruptArchiveError("frame count overflows", 20);
  const std::uint64_t expected = PFileHeader::kBytes + h.num_frames * rec;
  if (file_bytes < expected)
    throw CorruptArchiveError("truncated PFile: header promises " +
                                  std::to_string(expected) + " bytes, file has " +
                                  std::to_string(file_bytes),
                              file_bytes);
  if (file_bytes > expected)
    throw CorruptArchiveError("trailing bytes after last record", expected);
  return h;
}

// Enforces the utterance structure while records stream past.
class UtteranceTracker {
 public:
  void Reset() { *this = UtteranceTracker(); }

  void Check(const FrameRecord &r, std::uint64_t offset) {
    if (!have_last_ || r.utt_index != last_utt_) {
      if (r.frame_index != 0)
        throw CorruptArchiveError("utterance " + std::to_string(r.utt_index) +
                                      " does not start at frame 0",
                                  offset);
      utterances_++;
    } else if (r.frame_index != last_frame_ + 1) {
      throw CorruptArchiveError("non-contiguous frame index " +
                                    std::to_string(r.frame_index) + " in utterance " +
                                    std::to_string(r.utt_index),
                                offset);
    }
    have_last_ = true;
    last_utt_ = r.utt_index;
    last_frame_ = r.frame_index;
  }

  std::uint64_t utterances() const { return utterances_; }

 private:
  bool have_last_ = false;
  std::uint32_t last_utt_ = 0;
  std::uint32_t last_frame_ = 0;
  std::uint64_t utterances_ = 0;
};

void CheckUtteranceCount(const PFileHeader &h, const UtteranceTracker &t) {
  if (t.utterances() != h.num_utterances)
    throw CorruptArchiveError("header declares " + std::to_string(h.num_utterances) +
                                  " utterances, payload has " +
                                  std::to_string(t.utterances()),
                              12);
}

std::string FormatFloat(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), static_cast<float>(v));
  return std::string(buf, res.ptr);
}

template <typename T>
T ParseNumber(std::string_view text, std::size_t line, const char *what) {
  T value{};
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size() || text.empty())
    throw ParseError("line " + std::to_string(line) + ": bad " + what + " '" +
                         std::string(text) + "'",
                     line);
  return value;
}

std::string_view Trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

}  // namespace

DataSpec ParseDataSpec(std::string_view spec) {
  auto tokens = Split(spec, ',');
  DataSpec out;
  out.path = std::string(tokens[0]);
  if (out.path.empty()) throw ParseError("data spec has empty path", 0);
  for (std::size_t i = 1; i < tokens.size(); i++) {
    std::string_view token = tokens[i];
    std::size_t eq = token.find('=');
    if (eq == std::string_view::npos)
      throw ParseError("expected key=value, got '" + std::string(token) + "'", i);
    std::string_view key = token.substr(0, eq), value = token.substr(eq + 1);
    if (key == "partition") {
      out.partition_bytes = ParseByteCount(value, i);
    } else if (key == "random") {
      out.random = ParseFlag(key, value, i);
    } else if (key == "stream") {
      out.stream = ParseFlag(key, value, i);
    } else {
      throw ParseError("unknown data spec key '" + std::string(key) + "'", i);
    }
  }
  return out;
}

PFileWriter::PFileWriter(const std::string &path, std::uint32_t feature_dim,
                         bool with_labels)
    : file_(path) {
  header_.feature_dim = feature_dim;
  header_.label_present = with_labels;
  std::string head;
  EncodeHeader(header_, &head);
  file_.stream().write(head.data(), static_cast<std::streamsize>(head.size()));
}

void PFileWriter::Write(const FrameRecord &record) {
  if (closed_) throw ContractError("PFileWriter::Write after Close");
  if (record.features.size() != header_.feature_dim)
    throw ValidationError("record (utt " + std::to_string(record.utt_index) + ", frame " +
                          std::to_string(record.frame_index) + ") has dimension " +
                          std::to_string(record.features.size()) + ", archive has " +
                          std::to_string(header_.feature_dim));
  if (!have_last_ || record.utt_index != last_utt_) {
    if (record.frame_index != 0)
      throw ValidationError("utterance " + std::to_string(record.utt_index) +
                            " starts at frame " + std::to_string(record.frame_index));
    header_.num_utterances++;
  } else if (record.frame_index != last_frame_ + 1) {
    throw ValidationError("frame " + std::to_string(record.frame_index) + " of utterance " +
                          std::to_string(record.utt_index) + " follows frame " +
                          std::to_string(last_frame_));
  }
  have_last_ = true;
  last_utt_ = record.utt_index;
  last_frame_ = record.frame_index;
  header_.num_frames++;
  EncodeRecord(record, header_.label_present, &buffer_);
  if (buffer_.size() >= (1u << 20)) {
    file_.stream().write(buffer_.data(), static_cast<std::streamsize>(buffer_.size()));
    buffer_.clear();
  }
}

PFileHeader PFileWriter::Close() {
  if (closed_) return header_;
  auto &os = file_.stream();
  os.write(buffer_.data(), static_cast<std::streamsize>(buffer_.size()));
  buffer_.clear();
  std::string head;
  EncodeHeader(header_, &head);
  os.seekp(0);
  os.write(head.data(), static_cast<std::streamsize>(head.size()));
  file_.Commit();
  closed_ = true;
  return header_;
}

PFileHeader WritePFile(std::span<const FrameRecord> records, const std::string &path,
                       bool with_labels) {
  std::uint32_t dim =
      records.empty() ? 0 : static_cast<std::uint32_t>(records.front().features.size());
  PFileWriter writer(path, dim, with_labels);
  for (const auto &r : records) writer.Write(r);
  return writer.Close();
}

PFileHeader ReadPFileHeader(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path);
  std::string head(PFileHeader::kBytes, '\0');
  in.read(head.data(), static_cast<std::streamsize>(head.size()));
  head.resize(static_cast<std::size_t>(in.gcount()));
  return DecodeHeader(head, std::filesystem::file_size(path));
}

std::vector<FrameRecord> ReadPFile(const std::string &path, PFileHeader *header_out) {
  std::string bytes = ReadFileBytes(path);
  PFileHeader h = DecodeHeader(bytes, bytes.size());
  std::vector<FrameRecord> records;
  records.reserve(h.num_frames);
  UtteranceTracker tracker;
  const std::size_t rec = h.RecordBytes();
  for (std::uint64_t i = 0; i < h.num_frames; i++) {
    std::uint64_t offset = PFileHeader::kBytes + i * rec;
    records.push_back(DecodeRecord(bytes.data() + offset, h));
    tracker.Check(records.back(), offset);
  }
  CheckUtteranceCount(h, tracker);
  if (header_out) *header_out = h;
  return records;
}

std::string FormatRecordText(const FrameRecord &record, bool with_label) {
  std::string line = std::to_string(record.utt_index) + "\t" +
                     std::to_string(record.frame_index) + "\t[";
  for (std::size_t k = 0; k < record.features.size(); k++) {
    if (k) line += ", ";
    line += FormatFloat(record.features[k]);
  }
  line += "]";
  if (with_label) line += "\t" + std::to_string(record.label);
  return line;
}

void WritePFileText(const std::string &pfile_path, std::ostream &out) {
  PFileHeader h;
  auto records = ReadPFile(pfile_path, &h);
  for (const auto &r : records) out << FormatRecordText(r, h.label_present) << '\n';
}

PFileHeader PFileFromText(std::istream &in, const std::string &pfile_path) {
  std::vector<FrameRecord> records;
  std::optional<bool> with_labels;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    line_no++;
    std::string_view view = Trim(line);
    if (view.empty()) continue;
    auto fields = Split(view, '\t');
    if (fields.size() != 3 && fields.size() != 4)
      throw ParseError("line " + std::to_string(line_no) + ": expected 3 or 4 tab-separated fields",
                       line_no);
    bool has_label = fields.size() == 4;
    if (!with_labels) with_labels = has_label;
    if (*with_labels != has_label)
      throw ParseError("line " + std::to_string(line_no) + ": label column present on some lines only",
                       line_no);
    FrameRecord r;
    r.utt_index = ParseNumber<std::uint32_t>(Trim(fields[0]), line_no, "utterance index");
    r.frame_index = ParseNumber<std::uint32_t>(Trim(fields[1]), line_no, "frame index");
    std::string_view vec = Trim(fields[2]);
    if (vec.size() < 2 || vec.front() != '[' || vec.back() != ']')
      throw ParseError("line " + std::to_string(line_no) + ": feature vector must be bracketed",
                       line_no);
    vec = Trim(vec.substr(1, vec.size() - 2));
    if (!vec.empty())
      for (auto item : Split(vec, ','))
        r.features.push_back(ParseNumber<float>(Trim(item), line_no, "feature"));
    if (has_label) r.label = ParseNumber<std::uint32_t>(Trim(fields[3]), line_no, "label");
    records.push_back(std::move(r));
  }
  return WritePFile(records, pfile_path, with_labels.value_or(true));
}

std::size_t RecordsPerPartition(std::uint64_t partition_bytes, std::size_t record_bytes) {
  if (record_bytes == 0) return 1;
  return static_cast<std::size_t>(std::max<std::uint64_t>(1, partition_bytes / record_bytes));
}

struct PFileReader::StreamState {
  std::ifstream in;
  UtteranceTracker tracker;
};

PFileReader::PFileReader(DataSpec spec) : spec_(std::move(spec)) {
  header_ = ReadPFileHeader(spec_.path);
  per_partition_ = RecordsPerPartition(spec_.partition_bytes, header_.RecordBytes());
  if (!spec_.stream) {
    all_records_ = ReadPFile(spec_.path, &header_);
    NoteResident(header_.num_frames * header_.RecordBytes());
  } else {
    stream_ = std::make_unique<StreamState>();
    stream_->in.open(spec_.path, std::ios::binary);
    if (!stream_->in) throw Error("cannot open " + spec_.path);
    Rewind();
  }
}

PFileReader::~PFileReader() {
  if (prefetch_ && prefetch_->valid()) prefetch_->wait();
}

void PFileReader::NoteResident(std::uint64_t bytes) {
  resident_bytes_ = bytes;
  peak_resident_bytes_ = std::max(peak_resident_bytes_, bytes);
}

void PFileReader::Rewind() {
  next_ordinal_ = 0;
  if (!stream_) return;
  if (prefetch_ && prefetch_->valid()) prefetch_->wait();
  prefetch_.reset();
  handed_out_bytes_ = 0;
  NoteResident(0);
  stream_->in.clear();
  stream_->in.seekg(static_cast<std::streamoff>(PFileHeader::kBytes));
  stream_->tracker.Reset();
}

Partition PFileReader::ReadStreamPartition(std::size_t ordinal) {
  const std::uint64_t first = static_cast<std::uint64_t>(ordinal) * per_partition_;
  const std::uint64_t count = std::min<std::uint64_t>(per_partition_, header_.num_frames - first);
  const std::size_t rec = header_.RecordBytes();
  const std::uint64_t base = PFileHeader::kBytes + first * rec;
  std::string bytes(count * rec, '\0');
  stream_->in.read(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (static_cast<std::uint64_t>(stream_->in.gcount()) != bytes.size())
    throw CorruptArchiveError("PFile shrank while streaming",
                              base + static_cast<std::uint64_t>(stream_->in.gcount()));
  Partition p;
  p.ordinal = ordinal;
  p.records.reserve(count);
  for (std::uint64_t i = 0; i < count; i++) {
    p.records.push_back(DecodeRecord(bytes.data() + i * rec, header_));
    stream_->tracker.Check(p.records.back(), base + i * rec);
  }
  if (first + count == header_.num_frames) CheckUtteranceCount(header_, stream_->tracker);
  return p;
}

void PFileReader::LaunchPrefetch(std::size_t ordinal) {
  prefetch_ = std::async(std::launch::async,
                         [this, ordinal] { return ReadStreamPartition(ordinal); });
}

std::optional<Partition> PFileReader::Next(SeededRng &rng) {
  const std::uint64_t first = static_cast<std::uint64_t>(next_ordinal_) * per_partition_;
  std::optional<Partition> out;
  if (!stream_) {
    if (first >= all_records_.size()) return std::nullopt;
    std::size_t count = std::min<std::size_t>(per_partition_, all_records_.size() - first);
    Partition p;
    p.ordinal = next_ordinal_;
    auto begin = all_records_.begin() + static_cast<std::ptrdiff_t>(first);
    p.records.assign(begin, begin + static_cast<std::ptrdiff_t>(count));
    out = std::move(p);
  } else {
    // The caller has finished with the partition returned last time.
    handed_out_bytes_ = 0;
    NoteResident(prefetch_ ? std::min<std::uint64_t>(per_partition_, header_.num_frames - first) *
                                 header_.RecordBytes()
                           : 0);
    if (first >= header_.num_frames) return std::nullopt;
    Partition p;
    if (prefetch_) {
      p = prefetch_->get();
      prefetch_.reset();
    } else {
      p = ReadStreamPartition(next_ordinal_);
    }
    handed_out_bytes_ = p.records.size() * header_.RecordBytes();
    std::uint64_t prefetched = 0;
    const std::uint64_t next_first = first + p.records.size();
    if (next_first < header_.num_frames) {
      prefetched = std::min<std::uint64_t>(per_partition_, header_.num_frames - next_first) *
                   header_.RecordBytes();
      LaunchPrefetch(next_ordinal_ + 1);
    }
    NoteResident(handed_out_bytes_ + prefetched);
    out = std::move(p);
  }
  next_ordinal_++;
  if (spec_.random) Shuffle(std::span<FrameRecord>(out->records), rng);
  return out;
}

MemorySource::MemorySource(std::vector<FrameRecord> records, std::uint64_t partition_bytes,
                           bool random)
    : records_(std::move(records)), random_(random) {
  feature_dim_ =
      records_.empty() ? 0 : static_cast<std::uint32_t>(records_.front().features.size());
  per_partition_ =
      RecordsPerPartition(partition_bytes, PFileHeader::RecordBytesFor(feature_dim_, true));
}

std::optional<Partition> MemorySource::Next(SeededRng &rng) {
  const std::size_t first = next_ordinal_ * per_partition_;
  if (first >= records_.size()) return std::nullopt;
  const std::size_t count = std::min(per_partition_, records_.size() - first);
  Partition p;
  p.ordinal = next_ordinal_++;
  auto begin = records_.begin() + static_cast<std::ptrdiff_t>(first);
  p.records.assign(begin, begin + static_cast<std::ptrdiff_t>(count));
  if (random_) Shuffle(std::span<FrameRecord>(p.records), rng);
  return p;
}

std::vector<FrameRecord> Splice(std::span<const FrameRecord> records, int context) {
  if (context < 0) throw DomainError("splice context must be >= 0, got " + std::to_string(context));
  std::vector<FrameRecord> out;
  out.reserve(records.size());
  std::size_t begin = 0;
  while (begin < records.size()) {
    std::size_t end = begin + 1;
    while (end < records.size() && records[end].utt_index == records[begin].utt_index) end++;
    const std::ptrdiff_t len = static_cast<std::ptrdiff_t>(end - begin);
    for (std::ptrdiff_t t = 0; t < len; t++) {
      FrameRecord r = records[begin + static_cast<std::size_t>(t)];
      r.features.clear();
      r.features.reserve((2 * static_cast<std::size_t>(context) + 1) *
                         records[begin].features.size());
      for (std::ptrdiff_t o = -context; o <= context; o++) {
        std::ptrdiff_t src = std::clamp<std::ptrdiff_t>(t + o, 0, len - 1);
        const auto &f = records[begin + static_cast<std::size_t>(src)].features;
        r.features.insert(r.features.end(), f.begin(), f.end());
      }
      out.push_back(std::move(r));
    }
    begin = end;
  }
  return out;
}

FeatureStats ComputeFeatureStats(PartitionSource &data) {
  const std::size_t dim = data.feature_dim();
  Vector sum(dim, 0.0), sq(dim, 0.0);
  std::uint64_t frames = 0;
  SeededRng unused(0);
  data.Rewind();
  while (auto part = data.Next(unused)) {
    for (const auto &r : part->records)
      for (std::size_t k = 0; k < dim; k++) {
        sum[k] += r.features[k];
        sq[k] += r.features[k] * r.features[k];
      }
    frames += part->records.size();
  }
  data.Rewind();
  if (frames == 0) throw DataError("cannot compute feature statistics of an empty archive");
  FeatureStats stats{Vector(dim), Vector(dim)};
  const double n = static_cast<double>(frames);
  for (std::size_t k = 0; k < dim; k++) {
    stats.mean[k] = sum[k] / n;
    const double var = sq[k] / n - stats.mean[k] * stats.mean[k];
    stats.inv_std[k] = var > 1e-12 ? 1.0 / std::sqrt(var) : 1.0;
  }
  return stats;
}

StandardizedSource::StandardizedSource(PartitionSource &inner, FeatureStats stats)
    : inner_(inner), stats_(std::move(stats)) {
  if (stats_.mean.size() != inner_.feature_dim() || stats_.inv_std.size() != inner_.feature_dim())
    throw ShapeError("feature statistics of dimension " + std::to_string(stats_.mean.size()) +
                     " for a source of dimension " + std::to_string(inner_.feature_dim()));
}

std::optional<Partition> StandardizedSource::Next(SeededRng &rng) {
  auto part = inner_.Next(rng);
  if (part)
    for (auto &r : part->records)
      for (std::size_t k = 0; k < r.features.size(); k++)
        r.features[k] = (r.features[k] - stats_.mean[k]) * stats_.inv_std[k];
  return part;
}

PFileHeader SplicePFile(const std::string &in_path, const std::string &out_path, int context,
                        std::uint64_t partition_bytes) {
  if (context < 0) throw DomainError("splice context must be >= 0, got " + std::to_string(context));
  PFileReader reader(DataSpec{in_path, partition_bytes, false, true});
  const PFileHeader &in = reader.header();
  PFileWriter writer(out_path, static_cast<std::uint32_t>((2 * context + 1) * in.feature_dim),
                     in.label_present);
  std::vector<FrameRecord> pending;
  auto flush = [&](std::size_t count) {
    for (const auto &r : Splice(std::span(pending).first(count), context)) writer.Write(r);
    pending.erase(pending.begin(), pending.begin() + static_cast<std::ptrdiff_t>(count));
  };
  SeededRng unused(0);
  while (auto part = reader.Next(unused)) {
    for (auto &r : part->records) pending.push_back(std::move(r));
    // Everything before the last utterance is complete.
    std::size_t last = pending.size();
    while (last > 0 && pending[last - 1].utt_index == pending.back().utt_index) last--;
    flush(last);
  }
  flush(pending.size());
  return writer.Close();
}

LabeledBatch MakeBatch(std::span<const FrameRecord> records) {
  LabeledBatch batch;
  const std::size_t dim = records.empty() ? 0 : records.front().features.size();
  batch.features = Matrix(records.size(), dim);
  batch.labels.reserve(records.size());
  for (std::size_t i = 0; i < records.size(); i++) {
    if (records[i].features.size() != dim)
      throw DataError("record (utt " + std::to_string(records[i].utt_index) + ", frame " +
                      std::to_string(records[i].frame_index) + ") has dimension " +
                      std::to_string(records[i].features.size()) + ", expected " +
                      std::to_string(dim));
    std::copy(records[i].features.begin(), records[i].features.end(),
              batch.features.Row(i).begin());
    batch.labels.push_back(records[i].label);
  }
  return batch;
}

}  // namespace pdnn
