#include <benchmark/benchmark.h>

#include "genodyn/bifurc.hpp"
#include "genodyn/field.hpp"
#include "genodyn/netgraph.hpp"
#include "genodyn/netlang.hpp"
#include "genodyn/numerics/eigen.hpp"
#include "genodyn/orbits.hpp"

#include <fstream>
#include <random>
#include <sstream>

namespace {

using namespace genodyn;

graph::Network load(const std::string& name) {
    std::ifstream in(std::string(GENODYN_NETWORKS_DIR) + "/" + name);
    std::ostringstream os;
    os << in.rdbuf();
    return std::move(*graph::validate(*netlang::parse_network(os.str()).network).network);
}

numerics::Matrix random_matrix(std::size_t n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    numerics::Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) m(i, j) = U(rng);
    return m;
}

void Eigenvalues(benchmark::State& state) {
    const auto m = random_matrix(static_cast<std::size_t>(state.range(0)), 12345);
    for (auto _ : state) {
        auto s = numerics::eigenvalues(m);
        benchmark::DoNotOptimize(s);
    }
    state.SetComplexityN(state.range(0));
}
BENCHMARK(Eigenvalues)->RangeMultiplier(2)->Range(4, 64)->Complexity();

void IntegrateRing(benchmark::State& state) {
    const auto net = load("repressilator.grn");
    const auto binding =
        field::ParamBinding::defaults(net).with("m", 3.0).with("alpha", 5.0);
    const field::FieldSystem sys(net, binding);
    const auto rhs = sys.rhs();
    for (auto _ : state) {
        auto traj = numerics::integrate(rhs, {2.0, 1.0, 0.5}, 0.0, 100.0, {});
        benchmark::DoNotOptimize(traj);
    }
}
BENCHMARK(IntegrateRing);

void MultistartToggle(benchmark::State& state) {
    const auto net = load("toggle.grn");
    const auto binding = field::ParamBinding::defaults(net).with("m", 3.0);
    orbits::FindOptions opts;
    opts.grid_per_axis = static_cast<int>(state.range(0));
    for (auto _ : state) {
        auto res = orbits::find_equilibria(net, binding, opts);
        benchmark::DoNotOptimize(res);
    }
}
BENCHMARK(MultistartToggle)->Arg(8)->Arg(16);

void ClassifyToggle(benchmark::State& state) {
    const auto net = load("toggle.grn");
    const auto binding = field::ParamBinding::defaults(net);
    for (auto _ : state) {
        auto branch = bifurc::continue_branch(net, binding, "m", 0.0, 3.0, {});
        auto rep = bifurc::first_bifurcation(branch);
        benchmark::DoNotOptimize(rep);
    }
}
BENCHMARK(ClassifyToggle);

void CyclicSpectrumCompanion(benchmark::State& state) {
    const std::size_t n = static_cast<std::size_t>(state.range(0));
    numerics::Vector alpha(n);
    for (std::size_t i = 0; i < n; ++i) alpha[i] = 0.5 + 0.25 * static_cast<double>(i);
    for (auto _ : state) {
        auto s = bifurc::cyclic_spectrum_companion(alpha, -5.0);
        benchmark::DoNotOptimize(s);
    }
}
BENCHMARK(CyclicSpectrumCompanion)->Arg(3)->Arg(6)->Arg(12);

} // namespace

int main(int argc, char** argv) {
    ::benchmark::Initialize(&argc, argv);
    if (::benchmark::ReportUnrecognizedArguments(argc, argv)) return 1;
    ::benchmark::RunSpecifiedBenchmarks();
    ::benchmark::Shutdown();
    return 0;
}
