#include "argos/curate.hpp"

#include <algorithm>
#include <atomic>
#include <stdexcept>
#include <thread>

namespace argos {

std::vector<RewardBreakdown> score_sample(const CurationSample& sample, const Verifier& verifier) {
    if (sample.rollouts.empty())
        throw std::invalid_argument("curation sample \"" + sample.id + "\" has no rollouts");
    std::vector<RewardBreakdown> breakdowns;
    breakdowns.reserve(sample.rollouts.size());
    for (const std::string& text : sample.rollouts) {
        RawRollout rollout{sample.question, sample.answer_gt, sample.media_ref,
                           sample.media_kind, text, sample.frame_timestamps};
        breakdowns.push_back(verifier.score(rollout).breakdown);
    }
    return breakdowns;
}

std::pair<bool, std::size_t> filter_sample(const std::vector<RewardBreakdown>& breakdowns,
                                           double threshold) {
    if (breakdowns.empty()) throw std::invalid_argument("filter_sample: empty breakdown list");
    std::size_t best = 0;
    for (std::size_t i = 1; i < breakdowns.size(); ++i)
        if (breakdowns[i].r_final > breakdowns[best].r_final) best = i;
    return {breakdowns[best].r_final >= threshold, best};
}

namespace {

struct SlotResult {
    bool erred = false;
    std::string error;
    SampleVerdict verdict;
};

}  // namespace

CurationResult curate_stream(const std::vector<CurationSample>& samples, const Verifier& verifier,
                             int workers) {
    if (workers < 1) throw std::invalid_argument("curate_stream: workers must be >= 1");
    std::vector<SlotResult> slots(samples.size());
    std::atomic<std::size_t> cursor{0};

    auto work = [&] {
        for (;;) {
            const std::size_t i = cursor.fetch_add(1);
            if (i >= samples.size()) return;
            SlotResult& slot = slots[i];
            slot.verdict.id = samples[i].id;
            try {
                slot.verdict.breakdowns = score_sample(samples[i], verifier);
                const auto [kept, best] =
                    filter_sample(slot.verdict.breakdowns, verifier.config().filter_threshold);
                slot.verdict.kept = kept;
                slot.verdict.best_index = best;
                slot.verdict.max_score = slot.verdict.breakdowns[best].r_final;
            } catch (const std::exception& e) {
                slot.erred = true;
                slot.error = e.what();
            }
        }
    };

    const int pool = std::min<int>(workers, std::max<std::size_t>(samples.size(), 1));
    std::vector<std::thread> threads;
    for (int t = 1; t < pool; ++t) threads.emplace_back(work);
    work();
    for (auto& t : threads) t.join();

    CurationResult result;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        SlotResult& slot = slots[i];
        if (slot.erred) {
            result.report.retry_ids.push_back(samples[i].id);
            continue;
        }
        ++result.report.total_samples;
        if (slot.verdict.kept) {
            ++result.report.kept_samples;
            const std::string& best_text = samples[i].rollouts[slot.verdict.best_index];
            result.kept.push_back(KeptSample{
                samples[i], slot.verdict.best_index,
                canonicalize_timestamps(reformat_points(best_text)),
                slot.verdict.breakdowns[slot.verdict.best_index]});
        }
        result.report.per_sample.push_back(std::move(slot.verdict));
    }
    if (result.report.total_samples > 0)
        result.report.yield_rate = static_cast<double>(result.report.kept_samples) /
                                   static_cast<double>(result.report.total_samples);
    return result;
}

}  // namespace argos
