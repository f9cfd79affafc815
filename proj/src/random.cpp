#include <gsres/random.hpp>

#include <boost/math/special_functions/erf.hpp>

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>

namespace gsres {

namespace {

std::uint64_t splitmix64(std::uint64_t& state)
{
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

} // namespace

std::uint64_t derive_seed(std::uint64_t root, std::initializer_list<std::uint64_t> tags)
{
    std::uint64_t state = root;
    std::uint64_t h = splitmix64(state);
    for (std::uint64_t t : tags) {
        state ^= h + t * 0xd1b54a32d192ed03ULL;
        h = splitmix64(state);
    }
    return h;
}

Stream::Stream(std::uint64_t seed)
{
    std::uint64_t state = seed;
    for (auto& w : _s)
        w = splitmix64(state);
}

Stream::result_type Stream::operator()()
{
    const std::uint64_t result = std::rotl(_s[0] + _s[3], 23) + _s[0];
    const std::uint64_t t = _s[1] << 17;
    _s[2] ^= _s[0];
    _s[3] ^= _s[1];
    _s[1] ^= _s[2];
    _s[0] ^= _s[3];
    _s[2] ^= t;
    _s[3] = std::rotl(_s[3], 45);
    return result;
}

double Stream::uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

double Stream::uniform_open() { return (static_cast<double>((*this)() >> 12) + 0.5) * 0x1.0p-52; }

double Stream::uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

std::uint64_t Stream::index(std::uint64_t n)
{
    // Lemire's nearly-divisionless bounded draw.
    __uint128_t m = static_cast<__uint128_t>((*this)()) * n;
    auto low = static_cast<std::uint64_t>(m);
    if (low < n) {
        const std::uint64_t threshold = (0 - n) % n;
        while (low < threshold) {
            m = static_cast<__uint128_t>((*this)()) * n;
            low = static_cast<std::uint64_t>(m);
        }
    }
    return static_cast<std::uint64_t>(m >> 64);
}

double Stream::normal() { return normal_quantile(uniform_open()); }

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

namespace {
using double_policy = boost::math::policies::policy<boost::math::policies::promote_double<false>>;
}

double normal_quantile(double p) { return -std::numbers::sqrt2 * boost::math::erfc_inv(2.0 * p, double_policy()); }

TruncatedGaussian::TruncatedGaussian(double mean, double std, double lo, double hi)
    : _mean(mean), _std(std), _lo(lo), _hi(hi)
{
    if (!(lo < hi))
        throw SamplingError("truncated gaussian: empty interval");
    if (std == 0.0)
        return;
    if (!(std > 0.0))
        throw SamplingError("truncated gaussian: std must be positive");

    _a = (lo - mean) / std;
    _b = (hi - mean) / std;
    // Work in the lower tail where the CDF keeps its relative precision.
    _flip = _a > 0.0;
    if (_flip) {
        const double na = -_b;
        _b = -_a;
        _a = na;
    }
    _fa = normal_cdf(_a);
    _fb = normal_cdf(_b);
    if (!(_fb > _fa))
        throw SamplingError("truncated gaussian: interval has no probability mass");
}

double TruncatedGaussian::operator()(Stream& rng) const
{
    if (_std == 0.0)
        return std::clamp(_mean, _lo, _hi);
    const double u = _fa + rng.uniform_open() * (_fb - _fa);
    double z = std::clamp(normal_quantile(u), _a, _b);
    if (_flip)
        z = -z;
    return std::clamp(_mean + _std * z, _lo, _hi);
}

double sample_truncated_gaussian(double mean, double std, double lo, double hi, Stream& rng)
{
    return TruncatedGaussian(mean, std, lo, hi)(rng);
}

} // namespace gsres
