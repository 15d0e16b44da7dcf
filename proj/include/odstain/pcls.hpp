#pragma once

#include "odstain/fod.hpp"
#include "odstain/image.hpp"

namespace odstain {

// Probability-weighted mean feature vector per class.
struct PrototypeSet {
    int classes = 0;
    int dim = 0;
    std::vector<double> values;  // c*dim + d

    PrototypeSet() = default;
    PrototypeSet(int c, int d) : classes(c), dim(d), values(static_cast<std::size_t>(c) * d, 0.0) {}
    double& at(int c, int d) { return values[static_cast<std::size_t>(c) * dim + d]; }
    double at(int c, int d) const { return values[static_cast<std::size_t>(c) * dim + d]; }
};

// q_c = sum_i p_c(i) f(i) / sum_i p_c(i). A class whose probability mass
// falls below 1e-8 is a hard DegenerateClass error naming the class.
PrototypeSet compute_prototypes(const Tensor3& features, const Tensor3& probs);

// Per-pixel per-class cosine similarity. A feature or prototype with norm
// below 1e-12 yields similarity 0.
Tensor3 cross_similarity(const Tensor3& features, const PrototypeSet& prototypes);

// Softmax across the class axis.
Tensor3 class_softmax(const Tensor3& similarities);

// Prototype consistency between the generated image and the label: each
// image's features are scored against the other image's prototypes, the
// softmaxed predictions are compared with the pseudo-masks, and both
// directions are averaged over C*H*W.
double ctpc_loss(const Tensor3& f_fake, const Tensor3& p_fake, const Tensor3& f_real,
                 const Tensor3& p_real, const ClassMaskMap& m_fake, const ClassMaskMap& m_real);

// Probability-map invariant: values in [0,1], per-pixel channel sum 1 +- 1e-4.
void validate_prob_map(const Tensor3& probs);

}  // namespace odstain
