#ifndef SNNE_LOSSES_HPP
#define SNNE_LOSSES_HPP

#include <cstddef>
#include <string>
#include <vector>

#include "snne/matrix.hpp"
#include "snne/tape.hpp"

namespace snne {

enum class AuxKind { kContrastive, kCrossentropy, kNone };

AuxKind aux_kind_from_string(const std::string& s);
const char* aux_kind_name(AuxKind k);

// Weighted combination of the Gaussian regression loss with one optional
// auxiliary task on the projection head.
struct MultitaskLoss {
  double nll_weight = 1.0;
  double aux_weight = 1.0;
  AuxKind aux_kind = AuxKind::kContrastive;
  double contrastive_temperature = 0.1;

  void validate() const;
};

// Mean Gaussian negative log-likelihood:
//   (1/N) sum_i [ 0.5 log(2 pi) + log sigma_i + (y_i - mu_i)^2 / (2 sigma_i^2) ]
double gaussian_nll(const std::vector<double>& mu, const std::vector<double>& sigma,
                    const std::vector<double>& y);

// Supervised N-pairs contrastive loss over row embeddings. Anchors without
// an in-batch positive contribute nothing; with no anchors at all the loss
// is 0.
double npairs_contrastive(const Matrix& projections, const std::vector<int>& class_ids,
                          double tau);

// Mean softmax cross-entropy; class ids index logits columns.
double crossentropy(const Matrix& logits, const std::vector<int>& class_ids);

double combined_loss(const MultitaskLoss& cfg, const std::vector<double>& mu,
                     const std::vector<double>& sigma, const std::vector<double>& y,
                     const Matrix& projections, const std::vector<int>& class_ids);

// Tape builders for the same quantities; values match the plain functions.
Tape::NodeId gaussian_nll_node(Tape& t, Tape::NodeId mu, Tape::NodeId sigma,
                               const std::vector<double>& y);
Tape::NodeId npairs_contrastive_node(Tape& t, Tape::NodeId projections,
                                     const std::vector<int>& class_ids, double tau);
Tape::NodeId crossentropy_node(Tape& t, Tape::NodeId logits,
                               const std::vector<int>& class_ids);
Tape::NodeId combined_loss_node(Tape& t, const MultitaskLoss& cfg, Tape::NodeId mu,
                                Tape::NodeId sigma, Tape::NodeId projections,
                                const std::vector<double>& y,
                                const std::vector<int>& class_ids);

}  // namespace snne

#endif  // SNNE_LOSSES_HPP
