#include "sgc/data.hpp"

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "sgc/io_error.hpp"
#include "sgc/rng.hpp"

namespace sgc {

namespace {

constexpr double kPi = 3.141592653589793238462643;
constexpr double kLog2Pi = 1.8378770664093454835606594728112;

void read_exact(std::istream& is, void* dst, std::size_t n, const std::string& path,
                const char* what) {
  is.read(static_cast<char*>(dst), std::streamsize(n));
  if (std::size_t(is.gcount()) != n)
    throw IoError(IoError::Kind::kTruncated,
                  path + ": truncated while reading " + what);
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

void LabeledDataset::validate() const {
  if (features.rows() < 1 || features.cols() < 1)
    throw std::invalid_argument("dataset '" + name + "' is empty");
  if (Eigen::Index(labels.size()) != features.rows())
    throw std::invalid_argument("dataset '" + name + "': " +
                                std::to_string(labels.size()) + " labels for " +
                                std::to_string(features.rows()) + " rows");
  if (num_classes < 1)
    throw std::invalid_argument("dataset '" + name + "': num_classes must be >= 1");
  for (int y : labels)
    if (y < 0 || y >= num_classes)
      throw std::invalid_argument("dataset '" + name + "': label " + std::to_string(y) +
                                  " outside [0, " + std::to_string(num_classes) + ")");
  if (!features.allFinite())
    throw std::invalid_argument("dataset '" + name + "' has non-finite features");
}

AnalyticGaussianScore::AnalyticGaussianScore(std::vector<Eigen::VectorXd> means,
                                             std::vector<Eigen::VectorXd> variances,
                                             const SdeSpec& spec)
    : means_(std::move(means)), variances_(std::move(variances)), spec_(spec) {
  spec_.validate();
  if (means_.empty() || means_.size() != variances_.size())
    throw std::invalid_argument("AnalyticGaussianScore: need one (mean, variance) per class");
  for (std::size_t y = 0; y < means_.size(); ++y) {
    if (means_[y].size() != means_[0].size() || variances_[y].size() != means_[0].size())
      throw std::invalid_argument("AnalyticGaussianScore: inconsistent dimensions");
    if ((variances_[y].array() <= 0.0).any())
      throw std::invalid_argument("AnalyticGaussianScore: variances must be positive");
  }
}

void AnalyticGaussianScore::marginal_moments(double t, int y, Eigen::VectorXd& mu,
                                             Eigen::VectorXd& var) const {
  const double a = mean_scale(spec_, t);
  const double s = marginal_std(spec_, t);
  mu = a * means_[y];
  var = (a * a) * variances_[y].array() + s * s;
}

Eigen::VectorXd AnalyticGaussianScore::evaluate(const Eigen::VectorXd& x, double t,
                                                int y) const {
  check_args(x, t, y, spec_);
  Eigen::VectorXd mu, var;
  marginal_moments(t, y, mu, var);
  return -((x - mu).array() / var.array()).matrix();
}

Eigen::VectorXd AnalyticGaussianScore::input_jvp(const Eigen::VectorXd& x, double t,
                                                 int y, const Eigen::VectorXd& v) const {
  check_args(x, t, y, spec_);
  if (v.size() != input_dim())
    throw std::invalid_argument("input_jvp: tangent dimension mismatch");
  Eigen::VectorXd mu, var;
  marginal_moments(t, y, mu, var);
  return -(v.array() / var.array()).matrix();
}

Eigen::VectorXd AnalyticGaussianScore::input_vjp(const Eigen::VectorXd& x, double t,
                                                 int y, const Eigen::VectorXd& v) const {
  // The Jacobian is diagonal, hence symmetric: vjp == jvp.
  return input_jvp(x, t, y, v);
}

double AnalyticGaussianScore::class_logpdf(const Eigen::VectorXd& x, double t,
                                           int y) const {
  check_args(x, t, y, spec_);
  Eigen::VectorXd mu, var;
  marginal_moments(t, y, mu, var);
  const double quad = ((x - mu).array().square() / var.array()).sum();
  return -0.5 * (double(x.size()) * kLog2Pi + var.array().log().sum() + quad);
}

double AnalyticGaussianScore::data_logpdf(const Eigen::VectorXd& x, int y) const {
  if (x.size() != input_dim() || y < 0 || y >= num_classes())
    throw std::invalid_argument("data_logpdf: bad arguments");
  const Eigen::VectorXd& mu = means_[y];
  const Eigen::VectorXd& var = variances_[y];
  const double quad = ((x - mu).array().square() / var.array()).sum();
  return -0.5 * (double(x.size()) * kLog2Pi + var.array().log().sum() + quad);
}

AnalyticGaussianScore oracle_for(const LabeledDataset& ds, const SdeSpec& spec) {
  if (!ds.gaussian_params)
    throw std::invalid_argument("dataset '" + ds.name +
                                "' has no recorded Gaussian parameters");
  return {ds.gaussian_params->means, ds.gaussian_params->variances, spec};
}

LabeledDataset gen_two_gaussians(int n_per_class, const Eigen::VectorXd& mean0,
                                 const Eigen::VectorXd& mean1,
                                 const Eigen::VectorXd& cov, std::uint64_t seed) {
  if (n_per_class < 1)
    throw std::invalid_argument("gen_two_gaussians: n_per_class must be >= 1");
  const Eigen::Index d = mean0.size();
  if (mean1.size() != d || cov.size() != d)
    throw std::invalid_argument("gen_two_gaussians: mean/cov dimensions disagree");
  if ((cov.array() <= 0.0).any())
    throw std::invalid_argument("gen_two_gaussians: covariance must be positive");

  LabeledDataset ds;
  ds.features.resize(2 * Eigen::Index(n_per_class), d);
  ds.labels.assign(2 * std::size_t(n_per_class), 0);
  ds.num_classes = 2;
  ds.name = "two_gaussians";
  const Eigen::VectorXd sd = cov.array().sqrt();
  Rng rng(splitmix64(seed));
  for (int c = 0; c < 2; ++c) {
    const Eigen::VectorXd& m = c == 0 ? mean0 : mean1;
    for (int i = 0; i < n_per_class; ++i) {
      const Eigen::Index row = Eigen::Index(c) * n_per_class + i;
      for (Eigen::Index j = 0; j < d; ++j)
        ds.features(row, j) = m[j] + sd[j] * standard_normal(rng);
      ds.labels[std::size_t(row)] = c;
    }
  }
  ds.gaussian_params = GaussianMixtureParams{{mean0, mean1}, {cov, cov}};
  return ds;
}

LabeledDataset gen_two_moons(int n_per_class, double noise_std, std::uint64_t seed) {
  if (n_per_class < 1)
    throw std::invalid_argument("gen_two_moons: n_per_class must be >= 1");
  if (noise_std < 0.0) throw std::invalid_argument("gen_two_moons: noise_std < 0");

  LabeledDataset ds;
  ds.features.resize(2 * Eigen::Index(n_per_class), 2);
  ds.labels.assign(2 * std::size_t(n_per_class), 0);
  ds.num_classes = 2;
  ds.name = "two_moons";
  Rng rng(splitmix64(seed));
  for (int c = 0; c < 2; ++c) {
    for (int i = 0; i < n_per_class; ++i) {
      const Eigen::Index row = Eigen::Index(c) * n_per_class + i;
      const double a = kPi * uniform01(rng);
      double px = std::cos(a), py = std::sin(a);
      if (c == 1) {
        px = 1.0 - px;
        py = 0.5 - py;
      }
      ds.features(row, 0) = px + noise_std * standard_normal(rng);
      ds.features(row, 1) = py + noise_std * standard_normal(rng);
      ds.labels[std::size_t(row)] = c;
    }
  }
  return ds;
}

std::pair<LabeledDataset, LabeledDataset> split(const LabeledDataset& ds,
                                                double fraction, std::uint64_t seed) {
  ds.validate();
  if (!(fraction >= 0.0 && fraction <= 1.0))
    throw std::invalid_argument("split: fraction must lie in [0, 1]");

  std::vector<std::vector<Eigen::Index>> by_class(std::size_t(ds.num_classes));
  for (Eigen::Index i = 0; i < ds.size(); ++i)
    by_class[std::size_t(ds.labels[std::size_t(i)])].push_back(i);

  Rng rng(splitmix64(seed));
  std::vector<Eigen::Index> test_rows, train_rows;
  for (auto& rows : by_class) {
    // Fisher-Yates so the draw depends only on (seed, class sizes).
    for (std::size_t i = rows.size(); i > 1; --i) {
      const std::size_t j = std::size_t(rng() % i);
      std::swap(rows[i - 1], rows[j]);
    }
    const auto n_test = std::size_t(std::llround(fraction * double(rows.size())));
    test_rows.insert(test_rows.end(), rows.begin(), rows.begin() + long(n_test));
    train_rows.insert(train_rows.end(), rows.begin() + long(n_test), rows.end());
  }
  std::sort(test_rows.begin(), test_rows.end());
  std::sort(train_rows.begin(), train_rows.end());

  auto take = [&ds](const std::vector<Eigen::Index>& rows, const char* tag) {
    LabeledDataset out;
    out.features.resize(Eigen::Index(rows.size()), ds.dim());
    out.labels.resize(rows.size());
    out.num_classes = ds.num_classes;
    out.name = ds.name + "#" + tag;
    out.gaussian_params = ds.gaussian_params;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      out.features.row(Eigen::Index(i)) = ds.features.row(rows[i]);
      out.labels[i] = ds.labels[std::size_t(rows[i])];
    }
    return out;
  };
  return {take(train_rows, "train"), take(test_rows, "test")};
}

void write_tensor_file(const LabeledDataset& ds, const std::string& path) {
  ds.validate();
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw IoError(IoError::Kind::kOpen, path + ": cannot open for writing");
  const char magic[4] = {'S', 'G', 'C', 'T'};
  const std::uint32_t version = 1;
  const std::uint64_t n = std::uint64_t(ds.size()), d = std::uint64_t(ds.dim());
  const std::uint32_t nc = std::uint32_t(ds.num_classes);
  os.write(magic, 4);
  os.write(reinterpret_cast<const char*>(&version), 4);
  os.write(reinterpret_cast<const char*>(&n), 8);
  os.write(reinterpret_cast<const char*>(&d), 8);
  os.write(reinterpret_cast<const char*>(&nc), 4);
  std::vector<double> row(static_cast<std::size_t>(d));
  for (Eigen::Index i = 0; i < ds.size(); ++i) {
    for (Eigen::Index j = 0; j < ds.dim(); ++j) row[std::size_t(j)] = ds.features(i, j);
    os.write(reinterpret_cast<const char*>(row.data()),
             std::streamsize(sizeof(double) * row.size()));
  }
  for (int y : ds.labels) {
    const std::uint32_t label = std::uint32_t(y);
    os.write(reinterpret_cast<const char*>(&label), 4);
  }
  if (!os) throw IoError(IoError::Kind::kOpen, path + ": write failed");
}

LabeledDataset read_tensor_file(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError(IoError::Kind::kOpen, path + ": cannot open");

  char magic[4];
  read_exact(is, magic, 4, path, "magic");
  if (std::string(magic, 4) != "SGCT")
    throw IoError(IoError::Kind::kBadMagic, path + ": not a tensor file");
  std::uint32_t version = 0;
  read_exact(is, &version, 4, path, "version");
  if (version != 1)
    throw IoError(IoError::Kind::kBadVersion,
                  path + ": unsupported tensor file version " + std::to_string(version));
  std::uint64_t n = 0, d = 0;
  std::uint32_t nc = 0;
  read_exact(is, &n, 8, path, "sample count");
  read_exact(is, &d, 8, path, "dimension");
  read_exact(is, &nc, 4, path, "class count");
  constexpr std::uint64_t kMaxCells = std::uint64_t(1) << 31;
  if (n == 0 || d == 0 || nc == 0 || n > kMaxCells || d > kMaxCells ||
      n > kMaxCells / d)
    throw IoError(IoError::Kind::kDimensionOverflow,
                  path + ": implausible header sizes N=" + std::to_string(n) +
                      " D=" + std::to_string(d) + " classes=" + std::to_string(nc));

  LabeledDataset ds;
  ds.features.resize(Eigen::Index(n), Eigen::Index(d));
  ds.labels.resize(std::size_t(n));
  ds.num_classes = int(nc);
  ds.name = path;
  std::vector<double> row(static_cast<std::size_t>(d));
  for (std::uint64_t i = 0; i < n; ++i) {
    read_exact(is, row.data(), sizeof(double) * row.size(), path, "features");
    for (std::uint64_t j = 0; j < d; ++j)
      ds.features(Eigen::Index(i), Eigen::Index(j)) = row[std::size_t(j)];
  }
  for (std::uint64_t i = 0; i < n; ++i) {
    std::uint32_t label = 0;
    read_exact(is, &label, 4, path, "labels");
    if (label >= nc)
      throw IoError(IoError::Kind::kParse,
                    path + ": label " + std::to_string(label) + " >= class count");
    ds.labels[std::size_t(i)] = int(label);
  }
  return ds;
}

void write_csv_dataset(const LabeledDataset& ds, const std::string& path) {
  ds.validate();
  std::ofstream os(path, std::ios::trunc);
  if (!os) throw IoError(IoError::Kind::kOpen, path + ": cannot open for writing");
  for (Eigen::Index j = 0; j < ds.dim(); ++j) os << 'f' << j << ',';
  os << "label\n";
  for (Eigen::Index i = 0; i < ds.size(); ++i) {
    for (Eigen::Index j = 0; j < ds.dim(); ++j)
      os << format_double(ds.features(i, j)) << ',';
    os << ds.labels[std::size_t(i)] << '\n';
  }
  if (!os) throw IoError(IoError::Kind::kOpen, path + ": write failed");
}

LabeledDataset read_csv_dataset(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw IoError(IoError::Kind::kOpen, path + ": cannot open");

  std::string line;
  if (!std::getline(is, line))
    throw IoError(IoError::Kind::kTruncated, path + ": missing header");
  Eigen::Index d = Eigen::Index(std::count(line.begin(), line.end(), ','));
  if (d < 1 || line.substr(std::size_t(line.rfind(',')) + 1) != "label")
    throw IoError(IoError::Kind::kParse, path + ": malformed CSV header");

  std::vector<double> values;
  std::vector<int> labels;
  int max_label = 0;
  std::size_t line_no = 1;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    Eigen::Index col = 0;
    for (; std::getline(ss, cell, ','); ++col) {
      char* end = nullptr;
      errno = 0;
      if (col < d) {
        const double v = std::strtod(cell.c_str(), &end);
        if (end == cell.c_str() || *end != '\0' || errno == ERANGE)
          throw IoError(IoError::Kind::kParse, path + ":" + std::to_string(line_no) +
                                                   ": bad float '" + cell + "'");
        values.push_back(v);
      } else {
        const long y = std::strtol(cell.c_str(), &end, 10);
        if (end == cell.c_str() || *end != '\0' || y < 0 ||
            y > std::numeric_limits<int>::max())
          throw IoError(IoError::Kind::kParse, path + ":" + std::to_string(line_no) +
                                                   ": bad label '" + cell + "'");
        labels.push_back(int(y));
        max_label = std::max(max_label, int(y));
      }
    }
    if (col != d + 1)
      throw IoError(IoError::Kind::kParse,
                    path + ":" + std::to_string(line_no) + ": expected " +
                        std::to_string(d + 1) + " fields, got " + std::to_string(col));
  }
  if (labels.empty()) throw IoError(IoError::Kind::kTruncated, path + ": no data rows");

  LabeledDataset ds;
  ds.features.resize(Eigen::Index(labels.size()), d);
  for (Eigen::Index i = 0; i < ds.features.rows(); ++i)
    for (Eigen::Index j = 0; j < d; ++j)
      ds.features(i, j) = values[std::size_t(i * d + j)];
  ds.labels = std::move(labels);
  ds.num_classes = max_label + 1;
  ds.name = path;
  ds.validate();
  return ds;
}

}  // namespace sgc
