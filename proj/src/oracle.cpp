#include "qtt/oracle.hpp"

#include "qtt/error.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <mutex>
#include <string>
#include <thread>
#include <unordered_map>

namespace qtt {

struct FunctionOracle::State {
    std::size_t dim = 1;
    Multivariate f;
    bool cache_enabled = true;
    std::unordered_map<std::string, double> cache;
    std::size_t requests = 0;
    std::size_t evaluations = 0;
    std::size_t threads = std::max(1u, std::thread::hardware_concurrency());
    std::mutex mutex;

    std::string key(std::span<const double> p) const
    {
        std::string k(p.size() * sizeof(std::uint64_t), '\0');
        for (std::size_t i = 0; i < p.size(); ++i) {
            // +0.0 and -0.0 are the same point.
            const auto bits = std::bit_cast<std::uint64_t>(p[i] == 0.0 ? 0.0 : p[i]);
            std::memcpy(k.data() + i * sizeof bits, &bits, sizeof bits);
        }
        return k;
    }

    double call(std::span<const double> p) const
    {
        const double v = f(p);
        if (!std::isfinite(v))
            throw NumericalError("oracle returned a non-finite value");
        return v;
    }
};

FunctionOracle::FunctionOracle(Univariate f, bool cache) : state_(std::make_unique<State>())
{
    state_->dim = 1;
    state_->f = [g = std::move(f)](std::span<const double> p) { return g(p[0]); };
    state_->cache_enabled = cache;
}

FunctionOracle::FunctionOracle(std::size_t dimension, Multivariate f, bool cache)
    : state_(std::make_unique<State>())
{
    if (dimension == 0)
        throw ValidationError("FunctionOracle: dimension must be positive");
    state_->dim = dimension;
    state_->f = std::move(f);
    state_->cache_enabled = cache;
}

FunctionOracle::~FunctionOracle() = default;
FunctionOracle::FunctionOracle(FunctionOracle&&) noexcept = default;
FunctionOracle& FunctionOracle::operator=(FunctionOracle&&) noexcept = default;

std::size_t FunctionOracle::dimension() const { return state_->dim; }

double FunctionOracle::operator()(double x)
{
    if (state_->dim != 1)
        throw ValidationError("FunctionOracle: scalar call on a multivariate oracle");
    const double p[1] = {x};
    return (*this)(std::span<const double>(p, 1));
}

double FunctionOracle::operator()(std::span<const double> point)
{
    if (point.size() != state_->dim)
        throw ValidationError("FunctionOracle: point dimension mismatch");
    std::unique_lock lock(state_->mutex);
    ++state_->requests;
    if (state_->cache_enabled) {
        const auto k = state_->key(point);
        if (auto it = state_->cache.find(k); it != state_->cache.end())
            return it->second;
        ++state_->evaluations;
        lock.unlock();
        const double v = state_->call(point);
        lock.lock();
        state_->cache.emplace(k, v);
        return v;
    }
    ++state_->evaluations;
    lock.unlock();
    return state_->call(point);
}

std::vector<double> FunctionOracle::evaluate_batch(std::span<const double> points)
{
    const std::size_t d = state_->dim;
    if (points.size() % d != 0)
        throw ValidationError("evaluate_batch: point buffer not a multiple of dimension");
    const std::size_t n = points.size() / d;
    std::vector<double> out(n);

    // Resolve cache hits and collect distinct misses.
    std::vector<std::size_t> todo;
    std::vector<std::string> keys(state_->cache_enabled ? n : 0);
    {
        std::lock_guard lock(state_->mutex);
        state_->requests += n;
        std::unordered_map<std::string, std::size_t> first_miss;
        for (std::size_t i = 0; i < n; ++i) {
            if (!state_->cache_enabled) {
                todo.push_back(i);
                continue;
            }
            keys[i] = state_->key(points.subspan(i * d, d));
            if (auto it = state_->cache.find(keys[i]); it != state_->cache.end()) {
                out[i] = it->second;
            } else if (first_miss.emplace(keys[i], i).second) {
                todo.push_back(i);
            }
        }
        state_->evaluations += todo.size();
    }

    const std::size_t workers = std::min(state_->threads, std::max<std::size_t>(1, todo.size() / 64));
    auto run = [&](std::size_t begin, std::size_t end) {
        for (std::size_t j = begin; j < end; ++j) {
            const std::size_t i = todo[j];
            out[i] = state_->call(points.subspan(i * d, d));
        }
    };
    if (workers <= 1) {
        run(0, todo.size());
    } else {
        std::vector<std::thread> pool;
        std::vector<std::exception_ptr> errors(workers);
        const std::size_t chunk = (todo.size() + workers - 1) / workers;
        for (std::size_t w = 0; w < workers; ++w) {
            const std::size_t b = w * chunk, e = std::min(todo.size(), b + chunk);
            pool.emplace_back([&, w, b, e] {
                try {
                    run(b, e);
                } catch (...) {
                    errors[w] = std::current_exception();
                }
            });
        }
        for (auto& t : pool)
            t.join();
        for (auto& e : errors)
            if (e)
                std::rethrow_exception(e);
    }

    if (state_->cache_enabled) {
        std::lock_guard lock(state_->mutex);
        for (std::size_t i : todo)
            state_->cache.emplace(keys[i], out[i]);
        for (std::size_t i = 0; i < n; ++i) {
            if (auto it = state_->cache.find(keys[i]); it != state_->cache.end())
                out[i] = it->second;
        }
    }
    return out;
}

std::size_t FunctionOracle::requests() const { return state_->requests; }
std::size_t FunctionOracle::evaluations() const { return state_->evaluations; }

void FunctionOracle::reset_counters()
{
    std::lock_guard lock(state_->mutex);
    state_->requests = 0;
    state_->evaluations = 0;
}

void FunctionOracle::set_threads(std::size_t threads) { state_->threads = std::max<std::size_t>(1, threads); }

} // namespace qtt
