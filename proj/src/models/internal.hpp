#pragma once

#include <spdiag/models.hpp>

#include <memory>

namespace spdiag::detail {

std::unique_ptr<FittedModel> make_nn(const Dataset& train, std::uint64_t seed);
std::unique_ptr<FittedModel> make_kriging(const ModelSpec& spec,
                                          const Dataset& train,
                                          std::uint64_t seed);
std::unique_ptr<FittedModel> make_forest(const ModelSpec& spec,
                                         const Dataset& train,
                                         std::uint64_t seed);
std::unique_ptr<FittedModel> make_lda(const ModelSpec& spec,
                                      const Dataset& train,
                                      std::uint64_t seed);
std::unique_ptr<FittedModel> make_ok_rf(const ModelSpec& spec,
                                        const Dataset& train,
                                        std::uint64_t seed);
std::unique_ptr<FittedModel> make_nn_lda(const ModelSpec& spec,
                                         const Dataset& train,
                                         std::uint64_t seed);

/// Columns `features` of `ds` as an n x k matrix.
Eigen::MatrixXd select_columns(const Dataset& ds,
                               const std::vector<Index>& features);

nlohmann::json feature_list(const std::vector<std::string>& schema,
                            const std::vector<Index>& features);

}  // namespace spdiag::detail
