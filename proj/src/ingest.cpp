#include "bst/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>

#include "bst/binary_io.hpp"
#include "bst/errors.hpp"

namespace bst {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

} // namespace

std::vector<Symbol> bbit_minhash(std::span<const std::uint64_t> tokens, const MinhashParams& p) {
  const SketchParams params(p.bits, p.length);
  if (tokens.empty()) throw std::invalid_argument("minhash of an empty token set");
  std::vector<Symbol> out(params.length);
  const std::uint64_t mask = params.alphabet_size() - 1;
  for (unsigned j = 0; j < params.length; ++j) {
    const std::uint64_t key = splitmix64(p.seed ^ splitmix64(j + 1));
    std::uint64_t best = std::numeric_limits<std::uint64_t>::max();
    for (std::uint64_t t : tokens) best = std::min(best, splitmix64(t ^ key));
    out[j] = static_cast<Symbol>(best & mask);
  }
  return out;
}

SketchDataset generate(const SyntheticSpec& spec) {
  const SketchParams& params = spec.params;
  if (spec.radius > params.length) throw std::invalid_argument("radius exceeds sketch length");
  if (spec.kind == SyntheticKind::kPlanted && spec.clusters == 0) {
    throw std::invalid_argument("planted data needs at least one cluster");
  }
  std::mt19937_64 rng(spec.seed);
  const unsigned sigma = params.alphabet_size();
  const unsigned len = params.length;
  auto symbol = [&] { return static_cast<Symbol>(rng() & (sigma - 1)); };

  std::vector<Symbol> symbols(spec.n * len);
  if (spec.kind == SyntheticKind::kUniform) {
    for (auto& s : symbols) s = symbol();
    return SketchDataset(params, std::move(symbols));
  }

  const std::size_t centers = std::min(spec.clusters, spec.n);
  for (std::size_t i = 0; i < centers * len; ++i) symbols[i] = symbol();
  std::vector<unsigned> positions(len);
  for (std::size_t i = centers; i < spec.n; ++i) {
    const std::size_t c = (i - centers) % centers;
    std::copy_n(symbols.begin() + static_cast<std::ptrdiff_t>(c * len), len,
                symbols.begin() + static_cast<std::ptrdiff_t>(i * len));
    const unsigned k = static_cast<unsigned>(rng() % (spec.radius + 1));
    std::iota(positions.begin(), positions.end(), 0U);
    for (unsigned t = 0; t < k; ++t) {
      // Partial Fisher-Yates: positions[t] becomes a fresh random position.
      std::swap(positions[t], positions[t + rng() % (len - t)]);
      Symbol& s = symbols[i * len + positions[t]];
      if (sigma > 1) s = static_cast<Symbol>((s + 1 + rng() % (sigma - 1)) & (sigma - 1));
    }
  }
  return SketchDataset(params, std::move(symbols));
}

SketchDataset read_sketches(std::istream& in) {
  BinaryReader r(in);
  r.expect_tag("BSK1");
  const unsigned bits = r.u8();
  if (bits < 1 || bits > 8) throw FormatError("bits per symbol out of range", r.position() - 1);
  const unsigned len = r.u16();
  if (len < 1 || len > 256) throw FormatError("sketch length out of range", r.position() - 2);
  const std::uint64_t n = r.u64();
  if (n > (1ULL << 40) / len) throw FormatError("implausible sketch count", r.position() - 8);
  const SketchParams params(bits, len);
  const std::uint64_t header = r.position();

  // Grown chunk by chunk so a lying header on a short file fails on
  // truncation instead of on a huge allocation.
  const std::uint64_t total = n * len;
  constexpr std::size_t kChunk = 1 << 20;
  std::vector<Symbol> symbols;
  while (symbols.size() < total) {
    const std::size_t done = symbols.size();
    const std::size_t take = static_cast<std::size_t>(std::min<std::uint64_t>(kChunk, total - done));
    symbols.resize(done + take);
    r.bytes({symbols.data() + done, take});
  }
  const unsigned sigma = params.alphabet_size();
  for (std::size_t i = 0; i < symbols.size(); ++i) {
    if (symbols[i] >= sigma) {
      throw FormatError("symbol " + std::to_string(symbols[i]) + " does not fit in " +
                            std::to_string(bits) + " bits",
                        header + i);
    }
  }
  return SketchDataset(params, std::move(symbols));
}

SketchDataset read_sketches(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return read_sketches(in);
}

void write_sketches(const SketchDataset& ds, std::ostream& out) {
  BinaryWriter w(out);
  w.tag("BSK1");
  w.u8(static_cast<std::uint8_t>(ds.params().bits));
  w.u16(static_cast<std::uint16_t>(ds.params().length));
  w.u64(ds.size());
  w.bytes(ds.symbols());
}

void write_sketches(const SketchDataset& ds, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  write_sketches(ds, out);
  out.flush();
  if (!out) throw std::runtime_error("write to " + path.string() + " failed");
}

std::vector<std::vector<std::uint64_t>> read_token_sets(std::istream& in) {
  std::vector<std::vector<std::uint64_t>> sets;
  std::string line;
  std::uint64_t offset = 0;
  while (std::getline(in, line)) {
    std::vector<std::uint64_t> tokens;
    std::size_t pos = 0;
    while (pos < line.size()) {
      while (pos < line.size() && std::isspace(static_cast<unsigned char>(line[pos]))) ++pos;
      if (pos == line.size()) break;
      std::size_t end = pos;
      while (end < line.size() && !std::isspace(static_cast<unsigned char>(line[end]))) ++end;
      std::string_view word(line.data() + pos, end - pos);
      if (word.size() > 2 && word[0] == '0' && (word[1] == 'x' || word[1] == 'X')) {
        word.remove_prefix(2);
      }
      std::uint64_t v = 0;
      const auto [ptr, ec] = std::from_chars(word.data(), word.data() + word.size(), v, 16);
      if (ec != std::errc() || ptr != word.data() + word.size()) {
        throw FormatError("invalid hex token '" + std::string(line, pos, end - pos) + "'",
                          offset + pos);
      }
      tokens.push_back(v);
      pos = end;
    }
    if (!tokens.empty()) sets.push_back(std::move(tokens));
    offset += line.size() + 1;
  }
  return sets;
}

} // namespace bst
