#include <iostream>

#include "common.hpp"
#include "iotphy/iq/iq_file.hpp"
#include "iotphy/iq/quantize.hpp"
#include "iotphy/iq/word_codec.hpp"

namespace iotphy::cli {
namespace {

struct IqArgs {
    std::string in;
    std::string out;
    double full_scale = 1.0;
    std::uint64_t sample_rate_hz = 4000000;
};

void run_frame(const IqArgs& a) {
    const auto buf = iq::read_iq_file(a.in);
    const auto qs = iq::quantize(buf, a.full_scale);
    std::vector<iq::IqWord> words;
    words.reserve(qs.size());
    for (const auto& q : qs) words.push_back(iq::pack_word(q));
    iq::write_word_file(a.out, words);
    nlohmann::ordered_json j;
    j["words"] = words.size();
    j["sample_rate_hz"] = buf.sample_rate_hz;
    std::cout << j.dump(2) << '\n';
}

void run_deframe(const IqArgs& a) {
    const auto words = iq::read_word_file(a.in);
    const auto result = iq::deframe_words(iq::words_to_bits(words));
    const auto buf = iq::dequantize(result.samples, a.full_scale, a.sample_rate_hz);
    iq::write_iq_file(a.out, buf, "deframed from " + std::filesystem::path(a.in).filename().string());
    nlohmann::ordered_json j;
    j["samples"] = result.samples.size();
    j["lock_offsets"] = result.report.lock_offsets;
    auto discarded = nlohmann::ordered_json::array();
    for (const auto& r : result.report.discarded) discarded.push_back({r.begin, r.end});
    j["discarded_bits"] = discarded;
    std::cout << j.dump(2) << '\n';
}

}  // namespace

void register_iq_commands(CLI::App& app, GlobalOptions&) {
    auto* iq = app.add_subcommand("iq", "Convert between I/Q files and framed 32-bit word files");
    iq->require_subcommand(1);

    auto f = std::make_shared<IqArgs>();
    auto* frame = iq->add_subcommand("frame", "I/Q file -> big-endian word file");
    frame->add_option("--in", f->in, "Input I/Q file")->required();
    frame->add_option("--out", f->out, "Output word file")->required();
    frame->add_option("--full-scale", f->full_scale, "Amplitude mapped to the largest code")->check(CLI::PositiveNumber);
    frame->callback([f] { run_frame(*f); });

    auto d = std::make_shared<IqArgs>();
    auto* deframe = iq->add_subcommand("deframe", "Word file -> I/Q file, resynchronizing on sync patterns");
    deframe->add_option("--in", d->in, "Input word file")->required();
    deframe->add_option("--out", d->out, "Output I/Q file")->required();
    deframe->add_option("--full-scale", d->full_scale, "Amplitude of the largest code")->check(CLI::PositiveNumber);
    deframe->add_option("--sample-rate", d->sample_rate_hz, "Sample rate recorded in the sidecar")->check(CLI::PositiveNumber);
    deframe->callback([d] { run_deframe(*d); });
}

}  // namespace iotphy::cli
