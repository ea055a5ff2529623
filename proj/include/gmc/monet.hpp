#pragma once

#include <cstddef>
#include <vector>

#include "gmc/rng.hpp"
#include "gmc/tensor.hpp"

namespace gmc {

// Toy-scale MoNet: multi-view attention learning (MAL) blocks over stub
// multi-level features, fused by one more MAL and a small regression head.
struct MoNetConfig {
  std::size_t tokens = 16;  // C: patch tokens per feature map
  std::size_t embed = 8;    // D: embedding dim per token
  std::size_t levels = 4;   // N: feature levels taken from the backbone stub
  std::size_t mals = 3;     // M: number of independently seeded MALs
};

struct SelfAttentionWeights {
  Tensor wq, wk, wv;  // square projections over the token feature dim
};

// One MAL: per-level SAs, a pixel-wise branch over C tokens of dim D*N and a
// channel-wise branch over D tokens of dim C*N. The channel projections are
// N x N, applied per level fiber and shared across patches, so the branch
// commutes with any permutation of the C patch tokens.
struct MalWeights {
  std::vector<SelfAttentionWeights> level;  // N entries, D x D
  SelfAttentionWeights pixel;               // (D*N) x (D*N)
  SelfAttentionWeights channel;             // N x N
};

struct MoNetWeights {
  std::vector<Tensor> stub;          // frozen per-level D_in x D projections
  std::vector<MalWeights> mals;      // M view branches
  MalWeights regression;             // fuses M opinion features (D x N each)
  SelfAttentionWeights head_sa;      // transformer block attention, M x M
  Tensor ff1, ff2;                   // transformer block feed-forward
  Tensor conv1, conv2, conv3;        // 1-D convs over the N axis (k=5,3,3)
  Tensor fc1, fc1_b, fc2, fc2_b;     // final regressor
};

// Frozen random per-level projections standing in for a pretrained backbone.
std::vector<Tensor> make_stub_projections(std::size_t d_in,
                                          const MoNetConfig& cfg,
                                          std::uint64_t seed);
std::vector<Tensor> vit_stub_features(const Tensor& input,
                                      const std::vector<Tensor>& projections);

SelfAttentionWeights make_sa_weights(std::size_t dim, Rng& rng);
MalWeights make_mal_weights(const MoNetConfig& cfg, Rng& rng);
MalWeights make_mal_weights(const MoNetConfig& cfg, std::uint64_t seed);
MoNetWeights make_monet_weights(std::size_t d_in, const MoNetConfig& cfg,
                                std::uint64_t seed);

// softmax(Q K^T / sqrt(E)) V over rows of x (T x E). Optionally returns the
// attention matrix so callers can audit the softmax rows.
Tensor self_attention(const Tensor& x, const SelfAttentionWeights& w,
                      Tensor* attn_out = nullptr);

// N level features (C x D each) -> opinion feature (D x N).
Tensor mal_forward(const std::vector<Tensor>& features, const MalWeights& w,
                   const MoNetConfig& cfg,
                   std::vector<Tensor>* attn_maps = nullptr);

// Full model: input tokens (C x D_in) -> scalar quality score.
Tensor monet_forward(const Tensor& input, const MoNetConfig& cfg,
                     const MoNetWeights& w,
                     std::vector<Tensor>* attn_maps = nullptr);

// Trainable parameters in a stable order (stub projections excluded).
std::vector<Tensor> mal_parameters(const MalWeights& w);
std::vector<Tensor> monet_parameters(const MoNetWeights& w);

// Cosine of the flattened weight vectors of two same-shaped MALs.
double mal_weight_cosine_similarity(const MalWeights& a, const MalWeights& b);

// Ablation variant without any MAL: pooled stub features through the same
// final regressor topology.
struct SimpleNetWeights {
  std::vector<Tensor> stub;
  Tensor mix;  // N x N
  Tensor fc1, fc1_b, fc2, fc2_b;
};

SimpleNetWeights make_simple_weights(std::size_t d_in, const MoNetConfig& cfg,
                                     std::uint64_t seed);
Tensor simple_forward(const Tensor& input, const MoNetConfig& cfg,
                      const SimpleNetWeights& w);
std::vector<Tensor> simple_parameters(const SimpleNetWeights& w);

}  // namespace gmc
