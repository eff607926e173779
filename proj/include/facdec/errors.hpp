// Copyright 2026 The facdec Authors.
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

#pragma once

// Exception types thrown across the library. Every error derives from
// facdec::Error so callers that only care about "something failed" can catch
// a single type; the CLI maps them to exit codes.

#include <cstddef>
#include <stdexcept>
#include <string>

namespace facdec {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// ---- corpus loading ------------------------------------------------------

class MalformedRecord : public Error {
 public:
  MalformedRecord(std::size_t line_no, const std::string& detail)
      : Error("malformed record at line " + std::to_string(line_no) + ": " +
              detail),
        line_no_(line_no) {}
  std::size_t line_no() const { return line_no_; }

 private:
  std::size_t line_no_;
};

class DuplicateId : public Error {
 public:
  explicit DuplicateId(const std::string& id)
      : Error("duplicate id: " + id), id_(id) {}
  const std::string& id() const { return id_; }

 private:
  std::string id_;
};

class EmptyFile : public Error {
 public:
  explicit EmptyFile(const std::string& path) : Error("empty file: " + path) {}
};

class MalformedDoc : public Error {
 public:
  using Error::Error;
};

class MissingDoc : public Error {
 public:
  explicit MissingDoc(const std::string& doc_id)
      : Error("missing document: " + doc_id), doc_id_(doc_id) {}
  const std::string& doc_id() const { return doc_id_; }

 private:
  std::string doc_id_;
};

// ---- language-model backends --------------------------------------------

class BackendUnavailable : public Error {
 public:
  using Error::Error;
};

class UnknownToken : public Error {
 public:
  using Error::Error;
};

class EmptyCorpus : public Error {
 public:
  EmptyCorpus() : Error("empty training corpus") {}
};

class ZeroProbabilityToken : public Error {
 public:
  explicit ZeroProbabilityToken(std::size_t position)
      : Error("token at position " + std::to_string(position) +
              " has probability 0"),
        position_(position) {}
  std::size_t position() const { return position_; }

 private:
  std::size_t position_;
};

class InvalidConfig : public Error {
 public:
  using Error::Error;
};

// ---- scoring providers ---------------------------------------------------

class InvalidSpan : public Error {
 public:
  using Error::Error;
};

class EmptyCandidates : public Error {
 public:
  EmptyCandidates() : Error("candidate pool is empty") {}
};

class ProviderUnavailable : public Error {
 public:
  using Error::Error;
};

class EmbedderUnavailable : public ProviderUnavailable {
 public:
  using ProviderUnavailable::ProviderUnavailable;
};

class NliUnavailable : public ProviderUnavailable {
 public:
  using ProviderUnavailable::ProviderUnavailable;
};

class NoEntitiesInCorpus : public Error {
 public:
  NoEntitiesInCorpus() : Error("no named entities detected in corpus") {}
};

class EmptyEvidence : public Error {
 public:
  using Error::Error;
};

// ---- training data preparation -------------------------------------------

class EmptyTitle : public Error {
 public:
  explicit EmptyTitle(const std::string& doc_id)
      : Error("document has an empty title: " + doc_id) {}
};

class MissingRootIndex : public Error {
 public:
  MissingRootIndex() : Error("SC_ROOT pivot requires a root index") {}
};

class MissingSeed : public Error {
 public:
  MissingSeed() : Error("SC_RANDOM pivot requires a seed") {}
};

class PivotOutOfRange : public Error {
 public:
  PivotOutOfRange(std::size_t pivot, std::size_t length)
      : Error("pivot " + std::to_string(pivot) + " outside [0, " +
              std::to_string(length) + "]") {}
};

class MissingRootAnnotation : public Error {
 public:
  MissingRootAnnotation(const std::string& doc_id, std::size_t sent_idx)
      : Error("no root annotation for " + doc_id + "#" +
              std::to_string(sent_idx)),
        doc_id_(doc_id),
        sent_idx_(sent_idx) {}
  const std::string& doc_id() const { return doc_id_; }
  std::size_t sent_idx() const { return sent_idx_; }

 private:
  std::string doc_id_;
  std::size_t sent_idx_;
};

// ---- benchmark -----------------------------------------------------------

class TooFewReports : public Error {
 public:
  explicit TooFewReports(std::size_t n)
      : Error("trade-off curves need at least 2 reports, got " +
              std::to_string(n)) {}
};

}  // namespace facdec
