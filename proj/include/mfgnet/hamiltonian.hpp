#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "mfgnet/error.hpp"
#include "mfgnet/network.hpp"

namespace mfgnet {

/// Hamiltonian on one edge, convex in p.
class EdgeHamiltonian {
public:
    virtual ~EdgeHamiltonian() = default;
    [[nodiscard]] virtual double H(double y, double p) const = 0;
    [[nodiscard]] virtual double Hp(double y, double p) const = 0;
    /// A minimizer of p -> H(y, p); may be +-infinity when H is monotone.
    [[nodiscard]] virtual double p_min(double y) const = 0;
    [[nodiscard]] virtual double C0() const = 0;
    [[nodiscard]] virtual std::string describe() const = 0;
};

/// p^2/2 for |p| <= amax, amax|p| - amax^2/2 beyond.
class ClippedQuadratic final : public EdgeHamiltonian {
public:
    explicit ClippedQuadratic(double amax);
    [[nodiscard]] double H(double y, double p) const override;
    [[nodiscard]] double Hp(double y, double p) const override;
    [[nodiscard]] double p_min(double) const override { return 0.0; }
    [[nodiscard]] double C0() const override { return amax_; }
    [[nodiscard]] std::string describe() const override;

private:
    double amax_;
};

/// amax * max(0, |p| - c), the transform of c|a| on [-amax, amax].
class ClippedLinear final : public EdgeHamiltonian {
public:
    ClippedLinear(double amax, double c);
    [[nodiscard]] double H(double y, double p) const override;
    [[nodiscard]] double Hp(double y, double p) const override;
    [[nodiscard]] double p_min(double) const override { return 0.0; }
    [[nodiscard]] double C0() const override { return amax_; }
    [[nodiscard]] std::string describe() const override;

private:
    double amax_;
    double c_;
};

class ZeroHamiltonian final : public EdgeHamiltonian {
public:
    [[nodiscard]] double H(double, double) const override { return 0.0; }
    [[nodiscard]] double Hp(double, double) const override { return 0.0; }
    [[nodiscard]] double p_min(double) const override { return 0.0; }
    [[nodiscard]] double C0() const override { return 0.0; }
    [[nodiscard]] std::string describe() const override { return "zero"; }
};

/// User-supplied H and H_p with a declared constant; p_min found numerically.
class FunctionHamiltonian final : public EdgeHamiltonian {
public:
    using Fn = std::function<double(double, double)>;
    FunctionHamiltonian(Fn H, Fn Hp, double C0, std::string name = "function");
    [[nodiscard]] double H(double y, double p) const override { return H_(y, p); }
    [[nodiscard]] double Hp(double y, double p) const override { return Hp_(y, p); }
    [[nodiscard]] double p_min(double y) const override;
    [[nodiscard]] double C0() const override { return C0_; }
    [[nodiscard]] std::string describe() const override { return name_; }

private:
    Fn H_;
    Fn Hp_;
    double C0_;
    std::string name_;
};

/// Compact control interval and running cost L(y, a), strictly convex in a.
struct LagrangianSpec {
    double a_min = -1.0;
    double a_max = 1.0;
    std::function<double(double, double)> L;
    double length = 1.0;  // edge length, for sampling in y
};

/// H(y, p) = sup_a { -a p - L(y, a) }, maximized by golden-section search.
class LegendreHamiltonian final : public EdgeHamiltonian {
public:
    LegendreHamiltonian(LagrangianSpec spec, int control_grid_size);
    [[nodiscard]] double H(double y, double p) const override;
    [[nodiscard]] double Hp(double y, double p) const override;
    [[nodiscard]] double p_min(double y) const override;
    [[nodiscard]] double C0() const override { return C0_; }
    [[nodiscard]] std::string describe() const override { return "legendre"; }
    /// Maximizing control a*(y, p).
    [[nodiscard]] double argmax_control(double y, double p) const;

private:
    LagrangianSpec spec_;
    int grid_size_;
    double C0_ = 0.0;
};

/// Builds the Legendre transform; rejects L that fails a sampled convexity test.
[[nodiscard]] std::shared_ptr<const EdgeHamiltonian> legendre(const LagrangianSpec& spec,
                                                              int control_grid_size);

/// One Hamiltonian per edge; C0 is the maximum of the per-edge constants.
class HamiltonianModel {
public:
    HamiltonianModel() = default;
    HamiltonianModel(int edges, std::shared_ptr<const EdgeHamiltonian> all);
    explicit HamiltonianModel(std::vector<std::shared_ptr<const EdgeHamiltonian>> per_edge);

    [[nodiscard]] int edge_count() const noexcept { return static_cast<int>(edges_.size()); }
    [[nodiscard]] const EdgeHamiltonian& edge(int a) const { return *edges_.at(a); }
    [[nodiscard]] double C0() const;
    void set_edge(int a, std::shared_ptr<const EdgeHamiltonian> h) { edges_.at(a) = std::move(h); }

private:
    std::vector<std::shared_ptr<const EdgeHamiltonian>> edges_;
};

[[nodiscard]] double eval_H(const HamiltonianModel& m, const MetricNetwork& net, int a, double y,
                            double p);
[[nodiscard]] double eval_Hp(const HamiltonianModel& m, const MetricNetwork& net, int a, double y,
                             double p);

struct AssumptionReport {
    ValidationReport report;
    double worst_growth = 0.0;       // max of H - C0(|p|+1)
    double worst_slope = 0.0;        // max of |H_p| - C0
    double worst_x_variation = 0.0;  // max of |d_y H| - C0(|p|+1)
    double worst_convexity = 0.0;    // min second difference
    [[nodiscard]] bool ok() const noexcept { return report.ok(); }
};

struct AssumptionSamples {
    int y_samples = 9;
    int p_samples = 201;
    double p_range = 0.0;  // 0 means 4 (C0 + 1)
    double tol = 1e-9;
};

[[nodiscard]] AssumptionReport check_assumptions(const HamiltonianModel& m,
                                                 const MetricNetwork& net,
                                                 const AssumptionSamples& samples = {});

}  // namespace mfgnet
