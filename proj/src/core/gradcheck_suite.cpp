#include "core/gradcheck_suite.hpp"

#include <algorithm>
#include <sstream>

#include "core/errors.hpp"
#include "core/ops.hpp"
#include "core/rng.hpp"
#include "core/textio.hpp"

namespace mmb {

namespace {

// Identity forward with a 1% overshoot in the adjoint: stands in for a
// buggy backward rule so the checker's detection path stays honest.
Tensor identity_with_corrupted_adjoint(Graph& g, const Tensor& x) {
  Tensor out = Tensor::zeros(x.shape, x.requires_grad);
  *out.data = *x.data;
  if (out.requires_grad) {
    const std::size_t n = out.numel();
    g.record([x, out, n]() {
      for (std::size_t i = 0; i < n; ++i)
        (*x.grad)[i] += 1.01 * (*out.grad)[i];
    });
  }
  return out;
}

Tensor random_tensor(std::vector<int> shape, Rng& rng, double spread = 1.0) {
  Tensor t = Tensor::zeros(std::move(shape));
  for (double& v : *t.data) v = rng.gaussian() * spread;
  return t;
}

Tensor random_distribution(int n, Rng& rng) {
  Tensor t = Tensor::zeros({n});
  double sum = 0.0;
  for (double& v : *t.data) {
    v = 0.05 + rng.uniform();  // bounded away from zero
    sum += v;
  }
  for (double& v : *t.data) v /= sum;
  return t;
}

ModalSample random_sample(int steps, int src_dim, int tgt_dim, int classes,
                          Rng& rng) {
  ModalSample s;
  s.source = random_tensor({steps, src_dim}, rng);
  s.target = random_tensor({steps, tgt_dim}, rng);
  s.label = static_cast<int>(rng.uniform_index(classes));
  return s;
}

struct SuiteContext {
  std::uint64_t seed;
  int max_dim;
  bool sabotage;  // this case gets the corrupted adjoint
};

using CaseFn = GradCheckResult (*)(const SuiteContext&);

Tensor maybe_corrupt(Graph& g, const Tensor& t, bool sabotage) {
  return sabotage ? identity_with_corrupted_adjoint(g, t) : t;
}

int dim_in(std::uint64_t seed, const char* what, int max_dim, int lo = 1) {
  const int span = std::max(max_dim - lo + 1, 1);
  return lo + static_cast<int>(derive_seed(seed, what) % span);
}

GradCheckResult check_squared_norm(const SuiteContext& ctx) {
  Rng rng(derive_seed(ctx.seed, "case.squared_norm"));
  const int d = dim_in(ctx.seed, "sn.d", ctx.max_dim);
  Tensor point = random_tensor({d}, rng);
  const bool sabotage = ctx.sabotage;
  return grad_check(
      [sabotage](Graph& g, const Tensor& x) {
        Tensor y = maybe_corrupt(g, x, sabotage);
        return ops::squared_error_sum(g, y, Tensor::zeros(y.shape));
      },
      point);
}

GradCheckResult check_cosine_wrt_query(const SuiteContext& ctx) {
  Rng rng(derive_seed(ctx.seed, "case.cos_q"));
  const int d = dim_in(ctx.seed, "cos.d", ctx.max_dim);
  Tensor fixed = random_tensor({d}, rng);
  Tensor point = random_tensor({d}, rng);
  const bool sabotage = ctx.sabotage;
  return grad_check(
      [fixed, sabotage](Graph& g, const Tensor& x) {
        return ops::cosine_similarity(g, maybe_corrupt(g, x, sabotage), fixed);
      },
      point);
}

GradCheckResult check_cosine_wrt_key(const SuiteContext& ctx) {
  Rng rng(derive_seed(ctx.seed, "case.cos_k"));
  const int d = dim_in(ctx.seed, "cos.d", ctx.max_dim);
  Tensor fixed = random_tensor({d}, rng);
  Tensor point = random_tensor({d}, rng);
  const bool sabotage = ctx.sabotage;
  return grad_check(
      [fixed, sabotage](Graph& g, const Tensor& x) {
        return ops::cosine_similarity(g, fixed, maybe_corrupt(g, x, sabotage));
      },
      point);
}

GradCheckResult check_softmax(const SuiteContext& ctx) {
  Rng rng(derive_seed(ctx.seed, "case.softmax"));
  const int n = dim_in(ctx.seed, "sm.n", ctx.max_dim);
  Tensor target = random_distribution(n, rng);
  Tensor point = random_tensor({n}, rng);
  const bool sabotage = ctx.sabotage;
  return grad_check(
      [target, sabotage](Graph& g, const Tensor& x) {
        Tensor p = ops::scaled_softmax(g, maybe_corrupt(g, x, sabotage), 3.0);
        return ops::squared_error_sum(g, p, target);
      },
      point);
}

GradCheckResult check_kl_after_softmax(const SuiteContext& ctx) {
  Rng rng(derive_seed(ctx.seed, "case.kl_p"));
  const int n = std::max(2, dim_in(ctx.seed, "kl.n", ctx.max_dim));
  Tensor q = random_distribution(n, rng);
  Tensor point = random_tensor({n}, rng);
  const bool sabotage = ctx.sabotage;
  return grad_check(
      [q, sabotage](Graph& g, const Tensor& x) {
        Tensor p = ops::scaled_softmax(g, maybe_corrupt(g, x, sabotage), 2.0);
        return ops::kl_divergence(g, p, q);
      },
      point);
}

GradCheckResult check_kl_wrt_q(const SuiteContext& ctx) {
  Rng rng(derive_seed(ctx.seed, "case.kl_q"));
  const int n = std::max(2, dim_in(ctx.seed, "kl.n", ctx.max_dim));
  Tensor p = random_distribution(n, rng);
  Tensor point = random_tensor({n}, rng);
  const bool sabotage = ctx.sabotage;
  return grad_check(
      [p, sabotage](Graph& g, const Tensor& x) {
        Tensor q = ops::scaled_softmax(g, maybe_corrupt(g, x, sabotage), 2.0);
        return ops::kl_divergence(g, p, q);
      },
      point);
}

GradCheckResult check_cross_entropy(const SuiteContext& ctx) {
  Rng rng(derive_seed(ctx.seed, "case.ce"));
  const int k = std::max(2, dim_in(ctx.seed, "ce.k", ctx.max_dim));
  const int label = static_cast<int>(rng.uniform_index(k));
  Tensor point = random_tensor({k}, rng);
  const bool sabotage = ctx.sabotage;
  return grad_check(
      [label, sabotage](Graph& g, const Tensor& x) {
        return ops::cross_entropy(g, maybe_corrupt(g, x, sabotage), label);
      },
      point);
}

// Path checks: every model parameter at once, via a flat point vector.
// Detach flags are off so the analytic gradient is the gradient of the
// actual scalar being finite-differenced.
struct PathSetup {
  Model shape_template;
  ModalSample sample;
  Tensor point;
};

PathSetup make_path_setup(const SuiteContext& ctx) {
  // Path cases keep dims in [2, min(max_dim, 8)] to stay fast.
  const int cap = std::max(2, std::min(ctx.max_dim, 8));
  auto dim = [&](const char* what) { return dim_in(ctx.seed, what, cap, 2); };
  ModelConfig cfg;
  cfg.slots = dim("path.slots");
  cfg.scale = 4.0;
  cfg.src_feat_dim = dim("path.c");
  cfg.tgt_feat_dim = dim("path.d");
  cfg.hidden_dim = dim("path.h");
  cfg.fusion_dim = dim("path.f");
  cfg.detach_target_addressing = false;
  cfg.detach_save = false;
  const int src_dim = dim("path.src");
  const int tgt_dim = dim("path.tgt");
  const int classes = std::max(2, dim("path.k"));
  const int steps = dim_in(ctx.seed, "path.t", std::min(ctx.max_dim, 4));

  PathSetup setup;
  setup.shape_template =
      Model::init(cfg, src_dim, tgt_dim, classes,
                  derive_seed(ctx.seed, "path.model"));
  Rng rng(derive_seed(ctx.seed, "path.sample"));
  setup.sample = random_sample(steps, src_dim, tgt_dim, classes, rng);
  setup.point = flatten_parameters(setup.shape_template);
  return setup;
}

enum class PathLoss { Save, Bridge, Task, Total, RecallChain };

GradCheckResult check_path(const SuiteContext& ctx, PathLoss which) {
  PathSetup setup = make_path_setup(ctx);
  const Model& shape = setup.shape_template;
  const ModalSample sample = setup.sample;
  const bool sabotage = ctx.sabotage;
  return grad_check(
      [&shape, sample, which, sabotage](Graph& g, const Tensor& flat) {
        Model m = model_from_flat(g, shape, maybe_corrupt(g, flat, sabotage));
        if (which == PathLoss::RecallChain) {
          Tensor logits = recall_mode_logits(g, m, sample.source);
          return ops::cross_entropy(g, logits, sample.label);
        }
        SampleLosses losses = training_losses(g, m, sample);
        switch (which) {
          case PathLoss::Save: return *losses.save;
          case PathLoss::Bridge: return *losses.bridge;
          case PathLoss::Task: return losses.task;
          default: return losses.total;
        }
      },
      setup.point);
}

GradCheckResult check_save_path(const SuiteContext& ctx) {
  return check_path(ctx, PathLoss::Save);
}
GradCheckResult check_bridge_path(const SuiteContext& ctx) {
  return check_path(ctx, PathLoss::Bridge);
}
GradCheckResult check_task_path(const SuiteContext& ctx) {
  return check_path(ctx, PathLoss::Task);
}
GradCheckResult check_total_path(const SuiteContext& ctx) {
  return check_path(ctx, PathLoss::Total);
}
GradCheckResult check_recall_chain(const SuiteContext& ctx) {
  return check_path(ctx, PathLoss::RecallChain);
}

struct NamedCase {
  const char* name;
  CaseFn fn;
};

constexpr NamedCase kCases[] = {
    {"squared_norm", check_squared_norm},
    {"cosine_wrt_query", check_cosine_wrt_query},
    {"cosine_wrt_key", check_cosine_wrt_key},
    {"scaled_softmax", check_softmax},
    {"kl_after_softmax", check_kl_after_softmax},
    {"kl_wrt_source_addressing", check_kl_wrt_q},
    {"cross_entropy", check_cross_entropy},
    {"saving_loss_all_params", check_save_path},
    {"bridging_loss_all_params", check_bridge_path},
    {"task_loss_all_params", check_task_path},
    {"total_loss_all_params", check_total_path},
    {"address_softmax_recall_fuse_ce", check_recall_chain},
};

}  // namespace

Tensor flatten_parameters(const Model& model) {
  std::size_t total = 0;
  const auto params = model.parameters();
  for (const auto& [name, tensor] : params) total += tensor->numel();
  Tensor flat = Tensor::zeros({static_cast<int>(total)});
  std::size_t offset = 0;
  for (const auto& [name, tensor] : params) {
    std::copy(tensor->data->begin(), tensor->data->end(),
              flat.data->begin() + offset);
    offset += tensor->numel();
  }
  return flat;
}

Model model_from_flat(Graph& g, const Model& shape_template,
                      const Tensor& flat) {
  Model m = shape_template;
  std::size_t offset = 0;
  for (auto& [name, tensor] : m.parameters()) {
    *tensor = ops::slice(g, flat, offset, tensor->shape);
    offset += tensor->numel();
  }
  if (offset != flat.numel())
    throw DimensionError("model_from_flat: size mismatch");
  return m;
}

GradCheckSuite run_gradcheck_suite(std::uint64_t seed_base, int num_seeds,
                                   int max_dim, double tolerance,
                                   const std::string& sabotage_case) {
  if (num_seeds < 1) throw ValidationError("gradcheck: need at least 1 seed");
  if (max_dim < 1) throw ValidationError("gradcheck: dims must be >= 1");
  GradCheckSuite suite;
  suite.tolerance = tolerance;
  for (const NamedCase& nc : kCases) {
    for (int s = 0; s < num_seeds; ++s) {
      SuiteContext ctx;
      ctx.seed = derive_seed(seed_base, nc.name, s);
      ctx.max_dim = max_dim;
      ctx.sabotage = sabotage_case == nc.name;
      GradCheckResult r = nc.fn(ctx);
      GradCheckCase c;
      c.name = nc.name;
      c.seed = ctx.seed;
      c.max_rel_error = r.max_rel_error;
      c.worst_coord = r.worst_coord;
      c.finite = r.finite;
      c.passed = r.passes(tolerance);
      suite.all_passed = suite.all_passed && c.passed;
      suite.cases.push_back(std::move(c));
    }
  }
  return suite;
}

std::string GradCheckSuite::to_text() const {
  std::ostringstream os;
  os << "gradient check suite (tolerance " << fmt_double(tolerance) << ")\n";
  // One line per case, worst seed.
  std::string current;
  double worst = 0.0;
  std::size_t worst_coord = 0;
  bool ok = true, finite = true;
  auto flush = [&]() {
    if (current.empty()) return;
    os << (ok ? "  [pass] " : "  [FAIL] ") << current
       << "  max_rel_error=" << fmt_double(worst);
    if (!ok) os << "  worst_coord=" << worst_coord;
    if (!finite) os << "  (non-finite derivative)";
    os << "\n";
  };
  for (const GradCheckCase& c : cases) {
    if (c.name != current) {
      flush();
      current = c.name;
      worst = 0.0;
      ok = true;
      finite = true;
    }
    if (c.max_rel_error >= worst) {
      worst = c.max_rel_error;
      worst_coord = c.worst_coord;
    }
    ok = ok && c.passed;
    finite = finite && c.finite;
  }
  flush();
  os << (all_passed ? "all checks passed\n" : "CHECKS FAILED\n");
  return os.str();
}

}  // namespace mmb
