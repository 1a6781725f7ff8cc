#include "doctest.h"
#include "support/gradcheck.hpp"

using namespace evoke;

TEST_CASE("finite differences agree with autograd for every operator") {
  const auto results = testing::run_gradient_suite(100, 2024);
  for (const auto& r : results) {
    INFO(r.op << " max rel error " << r.max_rel_error << " over " << r.coordinates);
    CHECK(r.cases == 100);
    CHECK(r.coordinates >= r.cases);
    CHECK(r.max_rel_error < testing::kRelTolerance);
  }
}

TEST_CASE("gradient check catches a wrong derivative") {
  // A deliberately broken backward must be reported.
  testing::GradCase c;
  c.inputs = {Tensor<double>({1}, {0.7})};
  c.differentiable = {true};
  c.loss = [](const std::vector<testing::VarD>& v) {
    return make_result<double>("broken", Tensor<double>({1}, {v[0].value()[0] * v[0].value()[0]}),
                               {v[0].node()}, [](Node<double>& self) {
                                 self.inputs[0]->grad_buffer()[0] += self.grad[0];
                               });
  };
  testing::GradStats stats;
  testing::check_case(c, stats);
  CHECK(stats.max_rel_error > 0.1);
}
