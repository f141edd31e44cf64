#pragma once

// JSON-lines dataset files. Line 0 is a header object
//   {"ap":[names],"alphabet_size":N,"automaton_sha256":hex,"seed":S}
// followed by one record per line:
//   {"u":[ints],"v":[ints],"label":0|1,"n":int}
// Output is byte-deterministic for a given header and record sequence.

#include <fstream>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include <openssl/evp.h>

#include <json.hpp>  // vendored nlohmann/json

#include "omegalab/automaton.hpp"
#include "omegalab/hoa.hpp"
#include "omegalab/sampling.hpp"

namespace omegalab {

inline std::string sha256_hex(std::string_view data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1)
    throw std::runtime_error("sha256 failed");
  static const char* hexdigits = "0123456789abcdef";
  std::string out;
  out.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) {
    out += hexdigits[digest[i] >> 4];
    out += hexdigits[digest[i] & 0xF];
  }
  return out;
}

inline std::string automaton_sha256(const Dba& dba) { return sha256_hex(emit_hoa(dba)); }

struct DatasetHeader {
  std::vector<std::string> ap;
  std::uint32_t alphabet_size = 0;
  std::string automaton_sha256;
  std::uint64_t seed = 0;
};

struct Dataset {
  DatasetHeader header;
  std::vector<SequenceRecord> records;
};

inline DatasetHeader make_dataset_header(const Dba& dba, std::uint64_t seed) {
  DatasetHeader h;
  h.ap = dba.ap_names;
  h.alphabet_size = dba.alphabet().size();
  h.automaton_sha256 = automaton_sha256(dba);
  h.seed = seed;
  return h;
}

inline void write_dataset(std::ostream& out, const DatasetHeader& header,
                          const std::vector<SequenceRecord>& records) {
  nlohmann::ordered_json h;
  h["ap"] = header.ap;
  h["alphabet_size"] = header.alphabet_size;
  h["automaton_sha256"] = header.automaton_sha256;
  h["seed"] = header.seed;
  out << h.dump() << "\n";
  for (const auto& r : records) {
    nlohmann::ordered_json j;
    j["u"] = r.u;
    j["v"] = r.v;
    j["label"] = r.label ? 1 : 0;
    j["n"] = r.length();
    out << j.dump() << "\n";
  }
}

inline void write_dataset_file(const std::string& path, const DatasetHeader& header,
                               const std::vector<SequenceRecord>& records) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  write_dataset(out, header, records);
}

inline Dataset read_dataset(std::istream& in) {
  Dataset ds;
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("dataset: missing header line");
  {
    const auto h = nlohmann::json::parse(line);
    ds.header.ap = h.at("ap").get<std::vector<std::string>>();
    ds.header.alphabet_size = h.at("alphabet_size").get<std::uint32_t>();
    ds.header.automaton_sha256 = h.at("automaton_sha256").get<std::string>();
    ds.header.seed = h.at("seed").get<std::uint64_t>();
  }
  const std::uint32_t assignment_count = ds.header.alphabet_size - 1;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto j = nlohmann::json::parse(line);
    SequenceRecord r;
    r.u = j.at("u").get<std::vector<Symbol>>();
    r.v = j.at("v").get<std::vector<Symbol>>();
    const int label = j.at("label").get<int>();
    if (label != 0 && label != 1)
      throw std::runtime_error("dataset line " + std::to_string(line_no) +
                               ": label must be 0 or 1");
    r.label = label == 1;
    if (r.v.empty())
      throw std::runtime_error("dataset line " + std::to_string(line_no) +
                               ": empty period");
    for (Symbol s : r.u)
      if (s >= assignment_count)
        throw std::runtime_error("dataset line " + std::to_string(line_no) +
                                 ": symbol out of range");
    for (Symbol s : r.v)
      if (s >= assignment_count)
        throw std::runtime_error("dataset line " + std::to_string(line_no) +
                                 ": symbol out of range");
    if (j.at("n").get<int>() != r.length())
      throw std::runtime_error("dataset line " + std::to_string(line_no) +
                               ": n does not match |u|+1+|v|");
    ds.records.push_back(std::move(r));
  }
  return ds;
}

inline Dataset read_dataset_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open dataset: " + path);
  return read_dataset(in);
}

}  // namespace omegalab
