#include "gmc/monet.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "gmc/ops.hpp"

namespace gmc {

namespace {

Tensor init_matrix(std::size_t rows, std::size_t cols, Rng& rng,
                   bool requires_grad = true) {
  std::vector<double> v = rng.normal_vector(rows * cols);
  const double scale = 1.0 / std::sqrt(static_cast<double>(rows));
  for (double& x : v) x *= scale;
  return Tensor::from_vector(std::move(v), Shape{rows, cols}, requires_grad);
}

Tensor init_vector(std::size_t n, Rng& rng) {
  std::vector<double> v = rng.normal_vector(n);
  for (double& x : v) x *= 0.1;
  return Tensor::from_vector(std::move(v), Shape{n}, true);
}

void check_square(const Tensor& w, std::size_t dim, const char* name) {
  if (w.shape() != Shape{dim, dim})
    throw std::invalid_argument(std::string(name) +
                                ": projection must be square of dim " +
                                std::to_string(dim));
}

// Applies an N x N projection to every (d, c) fiber of a D x C x N tensor.
// Sharing the projection across patches keeps the channel branch invariant
// under permutations of the C patch tokens.
Tensor project_levels(const Tensor& x, const Tensor& w, std::size_t d,
                      std::size_t c, std::size_t n) {
  return reshape(matmul(reshape(x, {d * c, n}), w), {d, c, n});
}

Tensor channel_attention(const Tensor& f_dcn, const SelfAttentionWeights& w,
                         std::size_t d, std::size_t c, std::size_t n,
                         Tensor* attn_out) {
  Tensor q = reshape(project_levels(f_dcn, w.wq, d, c, n), {d, c * n});
  Tensor k = reshape(project_levels(f_dcn, w.wk, d, c, n), {d, c * n});
  Tensor v = reshape(project_levels(f_dcn, w.wv, d, c, n), {d, c * n});
  const double scale = 1.0 / std::sqrt(static_cast<double>(c * n));
  Tensor attn = softmax(matmul(q, transpose(k)) * scale, 1);
  if (attn_out) *attn_out = attn;
  return reshape(matmul(attn, v), {d, c, n});
}

// 1-D convolution over the token axis with same padding, via im2col.
Tensor conv1d_same(const Tensor& x, const Tensor& kernel, std::size_t k) {
  const std::size_t t = x.shape()[0], ch_in = x.shape()[1];
  if (kernel.shape() != Shape{k * ch_in, kernel.shape()[1]})
    throw std::invalid_argument("conv1d_same: kernel shape mismatch");
  const std::size_t pad = k / 2;
  Tensor zero = Tensor::zeros({pad, ch_in});
  Tensor padded = concat({zero, x, zero}, 0);
  std::vector<Tensor> windows;
  windows.reserve(t);
  for (std::size_t i = 0; i < t; ++i)
    windows.push_back(reshape(slice_rows(padded, i, k), {1, k * ch_in}));
  return matmul(concat(windows, 0), kernel);
}

}  // namespace

std::vector<Tensor> make_stub_projections(std::size_t d_in,
                                          const MoNetConfig& cfg,
                                          std::uint64_t seed) {
  if (d_in == 0) throw std::invalid_argument("stub: d_in must be positive");
  std::vector<Tensor> out;
  out.reserve(cfg.levels);
  for (std::size_t j = 0; j < cfg.levels; ++j) {
    Rng rng(seed, 300 + j);
    out.push_back(init_matrix(d_in, cfg.embed, rng, /*requires_grad=*/false));
  }
  return out;
}

std::vector<Tensor> vit_stub_features(const Tensor& input,
                                      const std::vector<Tensor>& projections) {
  if (input.shape().size() != 2)
    throw std::invalid_argument("vit_stub_features: input must be rank 2");
  std::vector<Tensor> out;
  out.reserve(projections.size());
  for (const Tensor& p : projections) {
    if (p.shape().size() != 2 || p.shape()[0] != input.shape()[1])
      throw std::invalid_argument("vit_stub_features: projection mismatch");
    out.push_back(matmul(input, p));
  }
  return out;
}

SelfAttentionWeights make_sa_weights(std::size_t dim, Rng& rng) {
  return {init_matrix(dim, dim, rng), init_matrix(dim, dim, rng),
          init_matrix(dim, dim, rng)};
}

MalWeights make_mal_weights(const MoNetConfig& cfg, Rng& rng) {
  if (!cfg.tokens || !cfg.embed || !cfg.levels)
    throw std::invalid_argument("mal: config dims must be positive");
  MalWeights w;
  for (std::size_t i = 0; i < cfg.levels; ++i)
    w.level.push_back(make_sa_weights(cfg.embed, rng));
  w.pixel = make_sa_weights(cfg.embed * cfg.levels, rng);
  w.channel = make_sa_weights(cfg.levels, rng);
  return w;
}

MalWeights make_mal_weights(const MoNetConfig& cfg, std::uint64_t seed) {
  Rng rng(seed);
  return make_mal_weights(cfg, rng);
}

Tensor self_attention(const Tensor& x, const SelfAttentionWeights& w,
                      Tensor* attn_out) {
  if (x.shape().size() != 2)
    throw std::invalid_argument("self_attention: input must be rank 2");
  const std::size_t e = x.shape()[1];
  check_square(w.wq, e, "self_attention wq");
  check_square(w.wk, e, "self_attention wk");
  check_square(w.wv, e, "self_attention wv");
  Tensor q = matmul(x, w.wq), k = matmul(x, w.wk), v = matmul(x, w.wv);
  const double scale = 1.0 / std::sqrt(static_cast<double>(e));
  Tensor attn = softmax(matmul(q, transpose(k)) * scale, 1);
  if (attn_out) *attn_out = attn;
  return matmul(attn, v);
}

Tensor mal_forward(const std::vector<Tensor>& features, const MalWeights& w,
                   const MoNetConfig& cfg, std::vector<Tensor>* attn_maps) {
  const std::size_t c = cfg.tokens, d = cfg.embed, n = cfg.levels;
  if (features.size() != n)
    throw std::invalid_argument("mal_forward: expected " + std::to_string(n) +
                                " level features, got " +
                                std::to_string(features.size()));
  if (w.level.size() != n)
    throw std::invalid_argument("mal_forward: weight/config level mismatch");
  std::vector<Tensor> stacked;
  stacked.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (features[i].shape() != Shape{c, d})
      throw std::invalid_argument("mal_forward: level feature must be C x D");
    Tensor attn;
    Tensor y = self_attention(features[i], w.level[i],
                              attn_maps ? &attn : nullptr);
    if (attn_maps) attn_maps->push_back(attn);
    stacked.push_back(reshape(y, {c, d, 1}));
  }
  Tensor f = concat(stacked, 2);  // C x D x N

  Tensor pixel_attn;
  Tensor pixel = self_attention(reshape(f, {c, d * n}), w.pixel,
                                attn_maps ? &pixel_attn : nullptr);
  if (attn_maps) attn_maps->push_back(pixel_attn);
  Tensor pixel_restored = reshape(pixel, {c, d, n});

  Tensor channel_attn;
  Tensor channel = channel_attention(permute(f, {1, 0, 2}), w.channel, d, c, n,
                                     attn_maps ? &channel_attn : nullptr);
  if (attn_maps) attn_maps->push_back(channel_attn);
  Tensor channel_restored = permute(channel, {1, 0, 2});

  return mean(add(pixel_restored, channel_restored), 0);  // D x N
}

MoNetWeights make_monet_weights(std::size_t d_in, const MoNetConfig& cfg,
                                std::uint64_t seed) {
  if (!cfg.mals) throw std::invalid_argument("monet: M must be positive");
  MoNetWeights w;
  w.stub = make_stub_projections(d_in, cfg, seed);
  for (std::size_t i = 0; i < cfg.mals; ++i) {
    Rng rng(seed, 10 + i);
    w.mals.push_back(make_mal_weights(cfg, rng));
  }
  // The fusing MAL reads the M opinion features (D x N each) as its levels.
  MoNetConfig reg_cfg{cfg.embed, cfg.levels, cfg.mals, 1};
  Rng reg_rng(seed, 100);
  w.regression = make_mal_weights(reg_cfg, reg_rng);

  Rng head(seed, 200);
  const std::size_t m = cfg.mals, n = cfg.levels;
  w.head_sa = make_sa_weights(m, head);
  w.ff1 = init_matrix(m, 2 * m, head);
  w.ff2 = init_matrix(2 * m, m, head);
  w.conv1 = init_matrix(5 * m, 8, head);
  w.conv2 = init_matrix(3 * 8, 8, head);
  w.conv3 = init_matrix(3 * 8, 8, head);
  w.fc1 = init_matrix(n * 8, 8, head);
  w.fc1_b = init_vector(8, head);
  w.fc2 = init_matrix(8, 1, head);
  w.fc2_b = init_vector(1, head);
  return w;
}

Tensor monet_forward(const Tensor& input, const MoNetConfig& cfg,
                     const MoNetWeights& w, std::vector<Tensor>* attn_maps) {
  if (w.mals.size() != cfg.mals)
    throw std::invalid_argument("monet_forward: weight/config MAL mismatch");
  std::vector<Tensor> features = vit_stub_features(input, w.stub);
  if (features.size() != cfg.levels)
    throw std::invalid_argument("monet_forward: stub level count mismatch");

  std::vector<Tensor> opinions;
  opinions.reserve(cfg.mals);
  for (const MalWeights& mw : w.mals)
    opinions.push_back(mal_forward(features, mw, cfg, attn_maps));

  MoNetConfig reg_cfg{cfg.embed, cfg.levels, cfg.mals, 1};
  Tensor fused = mal_forward(opinions, w.regression, reg_cfg, attn_maps);

  // Transformer block over the N fused tokens (dim M), then the conv head.
  Tensor head_attn;
  Tensor t1 = add(fused, self_attention(fused, w.head_sa,
                                        attn_maps ? &head_attn : nullptr));
  if (attn_maps) attn_maps->push_back(head_attn);
  Tensor t2 = add(t1, matmul(tanh(matmul(t1, w.ff1)), w.ff2));

  Tensor h = tanh(conv1d_same(t2, w.conv1, 5));
  h = tanh(conv1d_same(h, w.conv2, 3));
  h = tanh(conv1d_same(h, w.conv3, 3));

  Tensor flat = reshape(h, {1, cfg.levels * 8});
  Tensor hidden = tanh(add(matmul(flat, w.fc1), w.fc1_b));
  Tensor score = add(matmul(hidden, w.fc2), w.fc2_b);
  return reshape(score, {1});
}

std::vector<Tensor> mal_parameters(const MalWeights& w) {
  std::vector<Tensor> out;
  for (const SelfAttentionWeights& sa : w.level) {
    out.push_back(sa.wq);
    out.push_back(sa.wk);
    out.push_back(sa.wv);
  }
  for (const SelfAttentionWeights* sa : {&w.pixel, &w.channel}) {
    out.push_back(sa->wq);
    out.push_back(sa->wk);
    out.push_back(sa->wv);
  }
  return out;
}

std::vector<Tensor> monet_parameters(const MoNetWeights& w) {
  std::vector<Tensor> out;
  for (const MalWeights& mw : w.mals)
    for (const Tensor& t : mal_parameters(mw)) out.push_back(t);
  for (const Tensor& t : mal_parameters(w.regression)) out.push_back(t);
  for (const Tensor& t :
       {w.head_sa.wq, w.head_sa.wk, w.head_sa.wv, w.ff1, w.ff2, w.conv1,
        w.conv2, w.conv3, w.fc1, w.fc1_b, w.fc2, w.fc2_b})
    out.push_back(t);
  return out;
}

double mal_weight_cosine_similarity(const MalWeights& a, const MalWeights& b) {
  std::vector<Tensor> pa = mal_parameters(a), pb = mal_parameters(b);
  if (pa.size() != pb.size())
    throw std::invalid_argument("cosine: MAL architectures differ");
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < pa.size(); ++i) {
    if (pa[i].shape() != pb[i].shape())
      throw std::invalid_argument("cosine: MAL architectures differ");
    const std::vector<double>& va = pa[i].data();
    const std::vector<double>& vb = pb[i].data();
    for (std::size_t j = 0; j < va.size(); ++j) {
      dot += va[j] * vb[j];
      na += va[j] * va[j];
      nb += vb[j] * vb[j];
    }
  }
  if (na == 0.0 || nb == 0.0)
    throw std::domain_error("cosine: zero weight vector");
  return dot / (std::sqrt(na) * std::sqrt(nb));
}

SimpleNetWeights make_simple_weights(std::size_t d_in, const MoNetConfig& cfg,
                                     std::uint64_t seed) {
  SimpleNetWeights w;
  w.stub = make_stub_projections(d_in, cfg, seed);
  Rng rng(seed, 400);
  w.mix = init_matrix(cfg.levels, cfg.levels, rng);
  w.fc1 = init_matrix(cfg.levels, 8, rng);
  w.fc1_b = init_vector(8, rng);
  w.fc2 = init_matrix(8, 1, rng);
  w.fc2_b = init_vector(1, rng);
  return w;
}

Tensor simple_forward(const Tensor& input, const MoNetConfig& cfg,
                      const SimpleNetWeights& w) {
  std::vector<Tensor> features = vit_stub_features(input, w.stub);
  std::vector<Tensor> stacked;
  stacked.reserve(features.size());
  for (const Tensor& f : features)
    stacked.push_back(reshape(f, {cfg.tokens, cfg.embed, 1}));
  Tensor pooled = mean(concat(stacked, 2), 0);        // D x N
  Tensor mixed = tanh(matmul(pooled, w.mix));         // D x N
  Tensor vec = reshape(mean(mixed, 0), {1, cfg.levels});
  Tensor hidden = tanh(add(matmul(vec, w.fc1), w.fc1_b));
  return reshape(add(matmul(hidden, w.fc2), w.fc2_b), {1});
}

std::vector<Tensor> simple_parameters(const SimpleNetWeights& w) {
  return {w.mix, w.fc1, w.fc1_b, w.fc2, w.fc2_b};
}

}  // namespace gmc
