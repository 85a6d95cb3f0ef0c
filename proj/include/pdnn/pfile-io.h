// pdnn/pfile-io.h

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

// PFile feature archives.
//
// On-disk layout (all integers little-endian):
//
//   header, 29 bytes:
//     char[4]  magic "PFL1"
//     u32      format version (1)
//     u32      feature_dim
//     u64      num_utterances
//     u64      num_frames
//     u8       label flag (1 = every record carries a label)
//   then num_frames records in file order:
//     u32      utterance index
//     u32      frame index within the utterance, 0-based
//     f32[d]   features
//     u32      label (only when the label flag is 1)
//
// Records of one utterance are contiguous and their frame indices run
// 0, 1, 2, ...; an utterance is a maximal run of equal utterance indices.
// Features are widened to double in memory, so a write/read round trip is
// bit-exact for values representable as float.

#ifndef PDNN_PFILE_IO_H_
#define PDNN_PFILE_IO_H_

#include <cstdint>
#include <fstream>
#include <future>
#include <istream>
#include <memory>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "pdnn/file-util.h"
#include "pdnn/matrix.h"
#include "pdnn/random.h"

namespace pdnn {

struct FrameRecord {
  std::uint32_t utt_index = 0;
  std::uint32_t frame_index = 0;
  Vector features;
  std::uint32_t label = 0;

  bool operator==(const FrameRecord &) const = default;
};

struct PFileHeader {
  static constexpr std::string_view kMagic = "PFL1";
  static constexpr std::uint32_t kVersion = 1;
  static constexpr std::size_t kBytes = 29;

  std::uint32_t version = kVersion;
  std::uint32_t feature_dim = 0;
  std::uint64_t num_utterances = 0;
  std::uint64_t num_frames = 0;
  bool label_present = true;

  std::size_t RecordBytes() const { return RecordBytesFor(feature_dim, label_present); }
  static std::size_t RecordBytesFor(std::uint32_t dim, bool label_present) {
    return 8 + 4 * static_cast<std::size_t>(dim) + (label_present ? 4 : 0);
  }

  bool operator==(const PFileHeader &) const = default;
};

inline constexpr std::uint64_t kDefaultPartitionBytes = 256ULL << 20;

// Parsed "path[,partition=N[k|m|g]][,random=B][,stream=B]".
struct DataSpec {
  std::string path;
  std::uint64_t partition_bytes = kDefaultPartitionBytes;
  bool random = false;
  bool stream = false;

  bool operator==(const DataSpec &) const = default;
};

// ParseError naming the offending token on unknown keys, malformed sizes
// or non-boolean flags.
DataSpec ParseDataSpec(std::string_view spec);

// Streams records to a PFile.  The header counts are patched in on Close(),
// which also moves the file into place; an unclosed writer leaves nothing
// behind at `path`.
class PFileWriter {
 public:
  PFileWriter(const std::string &path, std::uint32_t feature_dim,
              bool with_labels = true);

  // ValidationError on a dimension change or a frame index that does not
  // continue the current utterance.
  void Write(const FrameRecord &record);
  PFileHeader Close();

  const PFileHeader &header() const { return header_; }

 private:
  AtomicOutputFile file_;
  PFileHeader header_;
  std::string buffer_;
  bool have_last_ = false;
  std::uint32_t last_utt_ = 0;
  std::uint32_t last_frame_ = 0;
  bool closed_ = false;
};

PFileHeader WritePFile(std::span<const FrameRecord> records, const std::string &path,
                       bool with_labels = true);

// Validates magic, version, and that the file length matches the counts.
PFileHeader ReadPFileHeader(const std::string &path);

// Whole-file read.  CorruptArchiveError with a byte offset on truncation,
// header/payload mismatch or broken utterance structure.
std::vector<FrameRecord> ReadPFile(const std::string &path,
                                   PFileHeader *header = nullptr);

// Text dump: one record per line, tab-separated as
//   utt <TAB> frame <TAB> [f0, f1, ...] <TAB> label
// with each feature printed as the shortest decimal that round-trips its
// 32-bit value.  The label column is omitted for label-less archives.
void WritePFileText(const std::string &pfile_path, std::ostream &out);
PFileHeader PFileFromText(std::istream &in, const std::string &pfile_path);
std::string FormatRecordText(const FrameRecord &record, bool with_label = true);

struct Partition {
  std::vector<FrameRecord> records;
  std::size_t ordinal = 0;  // index within the current pass
};

// A restartable sequence of partitions.  Next() hands out the following
// partition of the current pass (nullopt at its end); Rewind() starts a
// new pass.  Shuffling, when enabled, draws from the rng given to Next(),
// so the caller's rng call sequence determines the record order.
class PartitionSource {
 public:
  virtual ~PartitionSource() = default;
  virtual void Rewind() = 0;
  virtual std::optional<Partition> Next(SeededRng &rng) = 0;
  virtual std::uint32_t feature_dim() const = 0;
  virtual std::uint64_t num_frames() const = 0;
};

// Number of records a partition holds: greedy packing by file order, at
// least one record even when a single record exceeds the budget.
std::size_t RecordsPerPartition(std::uint64_t partition_bytes, std::size_t record_bytes);

// PFile-backed source implementing the partition / random / stream options.
//
// Without `stream`, the whole archive is read once and re-sliced on every
// pass.  With `stream`, partitions are read from disk on demand and the
// next one is prefetched on a background task (a hand-off queue of depth
// one), so at most two partitions are resident: the one last returned by
// Next() and the one being prefetched.
class PFileReader : public PartitionSource {
 public:
  explicit PFileReader(DataSpec spec);
  ~PFileReader() override;

  void Rewind() override;
  std::optional<Partition> Next(SeededRng &rng) override;
  std::uint32_t feature_dim() const override { return header_.feature_dim; }
  std::uint64_t num_frames() const override { return header_.num_frames; }

  const PFileHeader &header() const { return header_; }
  const DataSpec &spec() const { return spec_; }

  // Serialized bytes of records held by the reader and its consumer,
  // counting a returned partition as resident until the next Next() call.
  std::uint64_t resident_bytes() const { return resident_bytes_; }
  std::uint64_t peak_resident_bytes() const { return peak_resident_bytes_; }

 private:
  struct StreamState;

  Partition ReadStreamPartition(std::size_t ordinal);
  void LaunchPrefetch(std::size_t ordinal);
  void NoteResident(std::uint64_t bytes);

  DataSpec spec_;
  PFileHeader header_;
  std::size_t per_partition_ = 1;
  std::size_t next_ordinal_ = 0;

  // Non-stream mode.
  std::vector<FrameRecord> all_records_;

  // Stream mode.
  std::unique_ptr<StreamState> stream_;
  std::optional<std::future<Partition>> prefetch_;
  std::uint64_t handed_out_bytes_ = 0;

  std::uint64_t resident_bytes_ = 0;
  std::uint64_t peak_resident_bytes_ = 0;
};

// In-memory source over a record list, partitioned like PFileReader.
class MemorySource : public PartitionSource {
 public:
  MemorySource(std::vector<FrameRecord> records, std::uint64_t partition_bytes = kDefaultPartitionBytes,
               bool random = false);

  void Rewind() override { next_ordinal_ = 0; }
  std::optional<Partition> Next(SeededRng &rng) override;
  std::uint32_t feature_dim() const override { return feature_dim_; }
  std::uint64_t num_frames() const override { return records_.size(); }
  const std::vector<FrameRecord> &records() const { return records_; }

 private:
  std::vector<FrameRecord> records_;
  std::uint32_t feature_dim_ = 0;
  std::size_t per_partition_ = 1;
  bool random_ = false;
  std::size_t next_ordinal_ = 0;
};

// Per-dimension mean and inverse standard deviation of a source's
// features (inverse std 1 for constant dimensions).
struct FeatureStats {
  Vector mean;
  Vector inv_std;
};
// One full pass over `data`.  DataError when it holds no frames.
FeatureStats ComputeFeatureStats(PartitionSource &data);

// Presents `inner` with every feature standardized as (x - mean) * inv_std.
class StandardizedSource : public PartitionSource {
 public:
  StandardizedSource(PartitionSource &inner, FeatureStats stats);

  void Rewind() override { inner_.Rewind(); }
  std::optional<Partition> Next(SeededRng &rng) override;
  std::uint32_t feature_dim() const override { return inner_.feature_dim(); }
  std::uint64_t num_frames() const override { return inner_.num_frames(); }

 private:
  PartitionSource &inner_;
  FeatureStats stats_;
};

// Replaces each frame with the concatenation of frames t-c .. t+c of its
// utterance, replicating the first/last frame where neighbours run off
// the edge.  Labels and indices are kept.  DomainError when context < 0.
std::vector<FrameRecord> Splice(std::span<const FrameRecord> records, int context);

// Splice() over a whole archive, streamed one partition at a time while
// keeping utterances that straddle a partition boundary intact.
PFileHeader SplicePFile(const std::string &in_path, const std::string &out_path, int context,
                        std::uint64_t partition_bytes = kDefaultPartitionBytes);

// Features stacked as matrix rows, labels alongside.
struct LabeledBatch {
  Matrix features;
  std::vector<std::uint32_t> labels;
};
LabeledBatch MakeBatch(std::span<const FrameRecord> records);

}  // namespace pdnn

#endif  // PDNN_PFILE_IO_H_
