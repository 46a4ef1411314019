#include <bit>
#include <cstdint>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "sgc/io_error.hpp"
#include "sgc/score_model.hpp"

static_assert(std::endian::native == std::endian::little,
              "checkpoint and tensor formats are little-endian; byte swapping "
              "is not implemented");

namespace sgc {

namespace {

constexpr char kMagic[4] = {'S', 'G', 'C', 'K'};
constexpr std::uint32_t kVersion = 1;

void read_exact(std::istream& is, void* dst, std::size_t n, const std::string& path,
                const char* what) {
  is.read(static_cast<char*>(dst), std::streamsize(n));
  if (std::size_t(is.gcount()) != n)
    throw IoError(IoError::Kind::kTruncated,
                  path + ": truncated while reading " + what);
}

}  // namespace

void save_checkpoint(const MlpScoreNet& net, const std::string& path) {
  nlohmann::json header;
  header["arch"] = {
      {"hidden_width", MlpScoreNet::kHiddenWidth},
      {"time_frequencies", MlpScoreNet::kTimeFrequencies},
      {"class_embed_dim", MlpScoreNet::kClassEmbedDim},
  };
  header["input_dim"] = net.input_dim();
  header["num_classes"] = net.num_classes();
  header["seed"] = net.init_seed();
  const SdeSpec& s = net.sde();
  header["sde"] = {
      {"family", family_name(s.family)}, {"beta_min", s.beta_min},
      {"beta_max", s.beta_max},          {"sigma_min", s.sigma_min},
      {"sigma_max", s.sigma_max},        {"t_end", s.t_end},
      {"eps", s.eps},
  };
  const Eigen::VectorXd& f = net.time_frequencies();
  header["fourier_frequencies"] = std::vector<double>(f.data(), f.data() + f.size());
  header["param_count"] = std::uint64_t(net.param_count());
  const std::string json = header.dump();

  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw IoError(IoError::Kind::kOpen, path + ": cannot open for writing");
  os.write(kMagic, 4);
  os.write(reinterpret_cast<const char*>(&kVersion), 4);
  const std::uint64_t header_len = json.size();
  os.write(reinterpret_cast<const char*>(&header_len), 8);
  os.write(json.data(), std::streamsize(json.size()));
  os.write(reinterpret_cast<const char*>(net.params().data()),
           std::streamsize(sizeof(double) * std::size_t(net.param_count())));
  if (!os) throw IoError(IoError::Kind::kOpen, path + ": write failed");
}

MlpScoreNet load_checkpoint(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError(IoError::Kind::kOpen, path + ": cannot open");

  char magic[4];
  read_exact(is, magic, 4, path, "magic");
  if (std::string(magic, 4) != std::string(kMagic, 4))
    throw IoError(IoError::Kind::kBadMagic, path + ": not a checkpoint file");
  std::uint32_t version = 0;
  read_exact(is, &version, 4, path, "version");
  if (version != kVersion)
    throw IoError(IoError::Kind::kBadVersion,
                  path + ": unsupported checkpoint version " + std::to_string(version));
  std::uint64_t header_len = 0;
  read_exact(is, &header_len, 8, path, "header length");
  if (header_len > (1u << 26))
    throw IoError(IoError::Kind::kDimensionOverflow, path + ": header length " +
                                                         std::to_string(header_len) +
                                                         " is implausible");
  std::string json(header_len, '\0');
  read_exact(is, json.data(), header_len, path, "header");

  nlohmann::json header;
  try {
    header = nlohmann::json::parse(json);
  } catch (const nlohmann::json::exception& e) {
    throw IoError(IoError::Kind::kParse, path + ": bad header: " + e.what());
  }

  int input_dim, num_classes;
  std::uint64_t seed, param_count;
  SdeSpec spec;
  std::vector<double> freqs;
  try {
    const auto& arch = header.at("arch");
    if (arch.at("hidden_width") != MlpScoreNet::kHiddenWidth ||
        arch.at("time_frequencies") != MlpScoreNet::kTimeFrequencies ||
        arch.at("class_embed_dim") != MlpScoreNet::kClassEmbedDim)
      throw IoError(IoError::Kind::kParse,
                    path + ": architecture hyperparameters do not match this build");
    input_dim = header.at("input_dim").get<int>();
    num_classes = header.at("num_classes").get<int>();
    seed = header.at("seed").get<std::uint64_t>();
    param_count = header.at("param_count").get<std::uint64_t>();
    const auto& sde = header.at("sde");
    spec.family = family_from_name(sde.at("family").get<std::string>());
    spec.beta_min = sde.at("beta_min").get<double>();
    spec.beta_max = sde.at("beta_max").get<double>();
    spec.sigma_min = sde.at("sigma_min").get<double>();
    spec.sigma_max = sde.at("sigma_max").get<double>();
    spec.t_end = sde.at("t_end").get<double>();
    spec.eps = sde.at("eps").get<double>();
    freqs = header.at("fourier_frequencies").get<std::vector<double>>();
  } catch (const nlohmann::json::exception& e) {
    throw IoError(IoError::Kind::kParse, path + ": bad header: " + e.what());
  }

  MlpScoreNet net(input_dim, num_classes, spec, seed);
  if (param_count != std::uint64_t(net.param_count()))
    throw IoError(IoError::Kind::kDimensionOverflow,
                  path + ": header declares " + std::to_string(param_count) +
                      " parameters, architecture has " +
                      std::to_string(net.param_count()));
  if (freqs.size() != std::size_t(MlpScoreNet::kTimeFrequencies))
    throw IoError(IoError::Kind::kParse, path + ": wrong Fourier bank size");
  net.set_time_frequencies(
      Eigen::Map<const Eigen::VectorXd>(freqs.data(), Eigen::Index(freqs.size())));

  Eigen::VectorXd theta(net.param_count());
  read_exact(is, theta.data(), sizeof(double) * std::size_t(net.param_count()), path,
             "parameters");
  net.set_params(theta);
  return net;
}

}  // namespace sgc
