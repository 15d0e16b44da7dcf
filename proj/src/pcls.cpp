#include "odstain/pcls.hpp"

#include <algorithm>
#include <cmath>

namespace odstain {

namespace {

void require_grid_match(const Tensor3& f, const Tensor3& p) {
    if (f.height != p.height || f.width != p.width) {
        fail(Errc::ShapeMismatch, "feature and probability maps differ in spatial size");
    }
}

}  // namespace

PrototypeSet compute_prototypes(const Tensor3& features, const Tensor3& probs) {
    require_grid_match(features, probs);
    const int classes = probs.depth;
    const int dim = features.depth;
    if (classes < 2) fail(Errc::InvalidParameter, "at least 2 classes required");

    PrototypeSet q(classes, dim);
    std::vector<double> mass(static_cast<std::size_t>(classes), 0.0);
    for (int y = 0; y < probs.height; ++y) {
        for (int x = 0; x < probs.width; ++x) {
            for (int c = 0; c < classes; ++c) {
                const double w = probs.at(y, x, c);
                mass[static_cast<std::size_t>(c)] += w;
                for (int d = 0; d < dim; ++d) q.at(c, d) += w * features.at(y, x, d);
            }
        }
    }
    for (int c = 0; c < classes; ++c) {
        if (mass[static_cast<std::size_t>(c)] < 1e-8) {
            fail(Errc::DegenerateClass,
                 "class " + std::to_string(c) + " has vanishing probability mass");
        }
        for (int d = 0; d < dim; ++d) q.at(c, d) /= mass[static_cast<std::size_t>(c)];
    }
    return q;
}

Tensor3 cross_similarity(const Tensor3& features, const PrototypeSet& prototypes) {
    if (features.depth != prototypes.dim) {
        fail(Errc::ShapeMismatch, "feature dimension does not match prototype dimension");
    }
    std::vector<double> proto_norm(static_cast<std::size_t>(prototypes.classes), 0.0);
    for (int c = 0; c < prototypes.classes; ++c) {
        double n = 0.0;
        for (int d = 0; d < prototypes.dim; ++d) n += prototypes.at(c, d) * prototypes.at(c, d);
        proto_norm[static_cast<std::size_t>(c)] = std::sqrt(n);
    }

    Tensor3 sims(features.height, features.width, prototypes.classes);
    for (int y = 0; y < features.height; ++y) {
        for (int x = 0; x < features.width; ++x) {
            double fn = 0.0;
            for (int d = 0; d < features.depth; ++d) fn += features.at(y, x, d) * features.at(y, x, d);
            fn = std::sqrt(fn);
            for (int c = 0; c < prototypes.classes; ++c) {
                const double qn = proto_norm[static_cast<std::size_t>(c)];
                double s = 0.0;
                if (fn >= 1e-12 && qn >= 1e-12) {
                    double dot = 0.0;
                    for (int d = 0; d < features.depth; ++d) {
                        dot += features.at(y, x, d) * prototypes.at(c, d);
                    }
                    s = std::clamp(dot / (fn * qn), -1.0, 1.0);
                }
                sims.at(y, x, c) = s;
            }
        }
    }
    return sims;
}

Tensor3 class_softmax(const Tensor3& similarities) {
    if (similarities.depth < 2) fail(Errc::InvalidParameter, "at least 2 classes required");
    Tensor3 probs(similarities.height, similarities.width, similarities.depth);
    for (int y = 0; y < similarities.height; ++y) {
        for (int x = 0; x < similarities.width; ++x) {
            double hi = similarities.at(y, x, 0);
            for (int c = 1; c < similarities.depth; ++c) hi = std::max(hi, similarities.at(y, x, c));
            double denom = 0.0;
            for (int c = 0; c < similarities.depth; ++c) {
                const double e = std::exp(similarities.at(y, x, c) - hi);
                probs.at(y, x, c) = e;
                denom += e;
            }
            for (int c = 0; c < similarities.depth; ++c) probs.at(y, x, c) /= denom;
        }
    }
    return probs;
}

double ctpc_loss(const Tensor3& f_fake, const Tensor3& p_fake, const Tensor3& f_real,
                 const Tensor3& p_real, const ClassMaskMap& m_fake, const ClassMaskMap& m_real) {
    require_grid_match(f_fake, p_fake);
    require_grid_match(f_real, p_real);
    if (f_fake.height != f_real.height || f_fake.width != f_real.width) {
        fail(Errc::ShapeMismatch, "fake and real tensors differ in spatial size");
    }
    if (f_fake.depth != f_real.depth) {
        fail(Errc::ShapeMismatch, "fake and real feature dimensions differ");
    }
    if (p_fake.depth != p_real.depth) {
        fail(Errc::ShapeMismatch, "fake and real class counts differ");
    }
    const int classes = p_fake.depth;
    if (m_fake.height != f_fake.height || m_fake.width != f_fake.width ||
        m_real.height != f_fake.height || m_real.width != f_fake.width) {
        fail(Errc::ShapeMismatch, "mask size does not match the feature grid");
    }
    if (m_fake.classes != classes || m_real.classes != classes) {
        fail(Errc::ShapeMismatch, "mask class count does not match the probability maps");
    }

    const PrototypeSet q_fake = compute_prototypes(f_fake, p_fake);
    const PrototypeSet q_real = compute_prototypes(f_real, p_real);
    const Tensor3 pred_fr = class_softmax(cross_similarity(f_fake, q_real));
    const Tensor3 pred_rf = class_softmax(cross_similarity(f_real, q_fake));

    double sum = 0.0;
    for (int y = 0; y < f_fake.height; ++y) {
        for (int x = 0; x < f_fake.width; ++x) {
            for (int c = 0; c < classes; ++c) {
                sum += std::abs(pred_fr.at(y, x, c) - m_fake.at(y, x, c)) +
                       std::abs(pred_rf.at(y, x, c) - m_real.at(y, x, c));
            }
        }
    }
    return sum / (static_cast<double>(classes) * f_fake.height * f_fake.width);
}

void validate_prob_map(const Tensor3& probs) {
    for (int y = 0; y < probs.height; ++y) {
        for (int x = 0; x < probs.width; ++x) {
            double sum = 0.0;
            for (int c = 0; c < probs.depth; ++c) {
                const double v = probs.at(y, x, c);
                if (v < -1e-9 || v > 1.0 + 1e-9) {
                    fail(Errc::InvalidTensor, "probability outside [0, 1]");
                }
                sum += v;
            }
            if (std::abs(sum - 1.0) > 1e-4) {
                fail(Errc::InvalidTensor, "per-pixel class probabilities do not sum to 1");
            }
        }
    }
}

}  // namespace odstain
