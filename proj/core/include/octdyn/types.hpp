#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace octdyn {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Mat6 = Eigen::Matrix<double, 6, 6>;
using MatrixXd = Eigen::MatrixXd;
using VectorXd = Eigen::VectorXd;
using MatrixXcd = Eigen::MatrixXcd;
using VectorXcd = Eigen::VectorXcd;

using NodeId = std::uint32_t;
using DofId = std::uint64_t;

/// Error type thrown by all octdyn operations.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// One isotropic linear-elastic material.
struct Material {
  double E = 0.0;    ///< Young's modulus [Pa]
  double nu = 0.0;   ///< Poisson's ratio [-]
  double rho = 0.0;  ///< mass density [kg/m^3]
};

/// Material ids are 1-based; id 0 marks void.
class MaterialTable {
 public:
  void set(std::uint16_t id, const Material& m);
  bool has(std::uint16_t id) const;
  const Material& get(std::uint16_t id) const;
  const std::vector<std::pair<std::uint16_t, Material>>& entries() const { return entries_; }

 private:
  std::vector<std::pair<std::uint16_t, Material>> entries_;
};

inline void MaterialTable::set(std::uint16_t id, const Material& m) {
  if (id == 0) throw Error("material id 0 is reserved for void");
  if (!(m.E > 0.0)) throw Error("material E must be positive");
  if (!(m.rho > 0.0)) throw Error("material rho must be positive");
  if (!(m.nu > -1.0 && m.nu < 0.5)) throw Error("material nu must lie in (-1, 0.5)");
  for (auto& e : entries_) {
    if (e.first == id) {
      e.second = m;
      return;
    }
  }
  entries_.emplace_back(id, m);
}

inline bool MaterialTable::has(std::uint16_t id) const {
  for (const auto& e : entries_)
    if (e.first == id) return true;
  return false;
}

inline const Material& MaterialTable::get(std::uint16_t id) const {
  for (const auto& e : entries_)
    if (e.first == id) return e.second;
  throw Error("unknown material id " + std::to_string(id));
}

}  // namespace octdyn
