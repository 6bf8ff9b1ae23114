#ifndef DASHAPP_TESTS_REFERENCE_DASHA_HPP
#define DASHAPP_TESTS_REFERENCE_DASHA_HPP

#include <Eigen/Core>
#include <cstdint>
#include <vector>

#include "dashapp/compressors.hpp"
#include "dashapp/optimizer.hpp"
#include "dashapp/problems.hpp"

namespace dashapp::testing {

/*
    A from-scratch implementation of the always-participating method (every
    node active every round, no 1/p_a corrections anywhere) used as the
    comparison target for the reduction test.  It shares only the Problem
    oracles and Compressor objects with the engine and keys its random
    streams identically, so a full-participation engine run must reproduce
    it draw for draw.
*/
class ReferenceDasha {
 public:
  ReferenceDasha(const Problem& problem, std::vector<Compressor> compressors,
                 VariantConfig config, std::uint64_t seed,
                 Eigen::VectorXd x0);

  void step();

  Eigen::VectorXd x;
  Eigen::VectorXd g_server;
  std::vector<Eigen::VectorXd> g;
  std::vector<Eigen::VectorXd> h;
  std::vector<Eigen::MatrixXd> h_ij;  // finite-sum recursion only
  int round = 0;

 private:
  Eigen::VectorXd node_k(int i, const Eigen::VectorXd& x_new,
                         const Eigen::VectorXd& x_old, int coin);

  const Problem* pb_;
  std::vector<Compressor> comps_;
  VariantConfig cfg_;
  std::uint64_t seed_;
};

}  // namespace dashapp::testing

#endif
