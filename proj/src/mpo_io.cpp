#include "tnrsvd/mpo_io.hpp"

#include <bit>
#include <fstream>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>

#include <json.hpp>

namespace tnrsvd {

static_assert(std::endian::native == std::endian::little,
              "MPO serialization assumes a little-endian host");

namespace {

constexpr const char* kMagic = "TNRSVD-MPO 1";

template <typename T>
void write_raw(std::ostream& out, const T* data, std::size_t count) {
  out.write(reinterpret_cast<const char*>(data), static_cast<std::streamsize>(sizeof(T) * count));
}

template <typename T>
void read_raw(std::istream& in, T* data, std::size_t count) {
  in.read(reinterpret_cast<char*>(data), static_cast<std::streamsize>(sizeof(T) * count));
  if (!in) throw std::runtime_error("truncated MPO file");
}

}  // namespace

void write_mpo(std::ostream& out, const Mpo& m) {
  nlohmann::json header;
  header["d"] = m.num_cores();
  header["row_dims"] = m.row_dims();
  header["col_dims"] = m.col_dims();
  header["ranks"] = m.ranks();
  nlohmann::json cores = nlohmann::json::array();
  for (const auto& c : m.cores()) {
    if (c.is_sparse()) {
      cores.push_back({{"storage", "sparse"}, {"nnz", c.entries().size()}});
    } else {
      cores.push_back({{"storage", "dense"}});
    }
  }
  header["cores"] = cores;
  out << kMagic << '\n' << header.dump() << '\n';
  for (const auto& c : m.cores()) {
    if (c.is_sparse()) {
      for (const auto& e : c.entries()) {
        const std::uint64_t offset = e.offset;
        write_raw(out, &offset, 1);
        write_raw(out, &e.value, 1);
      }
    } else {
      const auto data = c.dense().data();
      write_raw(out, data.data(), data.size());
    }
  }
  if (!out) throw std::runtime_error("failed writing MPO");
}

Mpo read_mpo(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kMagic) {
    throw std::runtime_error("not an MPO file (bad magic line)");
  }
  if (!std::getline(in, line)) throw std::runtime_error("MPO file has no header");
  nlohmann::json header;
  try {
    header = nlohmann::json::parse(line);
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error(std::string("malformed MPO header: ") + e.what());
  }
  const auto d = header.at("d").get<Index>();
  const auto rows = header.at("row_dims").get<Dims>();
  const auto cols = header.at("col_dims").get<Dims>();
  const auto ranks = header.at("ranks").get<Dims>();
  const auto& cores_meta = header.at("cores");
  if (rows.size() != d || cols.size() != d || ranks.size() != d + 1 || cores_meta.size() != d) {
    throw std::runtime_error("inconsistent MPO header");
  }
  std::vector<MpoCore> cores;
  for (Index k = 0; k < d; ++k) {
    const auto storage = cores_meta[k].at("storage").get<std::string>();
    if (storage == "dense") {
      DenseTensor t({ranks[k], rows[k], cols[k], ranks[k + 1]});
      read_raw(in, t.data().data(), t.size());
      cores.emplace_back(std::move(t));
    } else if (storage == "sparse") {
      const auto nnz = cores_meta[k].at("nnz").get<Index>();
      std::vector<SparseEntry> entries(nnz);
      for (auto& e : entries) {
        std::uint64_t offset = 0;
        read_raw(in, &offset, 1);
        read_raw(in, &e.value, 1);
        e.offset = offset;
      }
      cores.push_back(MpoCore::sparse(ranks[k], rows[k], cols[k], ranks[k + 1], std::move(entries)));
    } else {
      throw std::runtime_error("unknown core storage '" + storage + "'");
    }
  }
  return Mpo(std::move(cores));
}

void save_mpo(const std::filesystem::path& path, const Mpo& m) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  write_mpo(out, m);
}

Mpo load_mpo(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return read_mpo(in);
}

}  // namespace tnrsvd
