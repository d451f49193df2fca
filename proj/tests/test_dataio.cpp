#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstring>
#include <filesystem>
#include <map>

#include "mgfusion/dataio/dataset.hpp"
#include "mgfusion/dataio/manifest.hpp"
#include "mgfusion/dataio/stack_codec.hpp"
#include "mgfusion/dataio/synthetic.hpp"
#include "test_support.hpp"

using namespace mgf;
using test::thrown_kind;

namespace {

LayeredEmbedding random_stack(Rng& rng, Modality m, Granularity g, std::size_t L, std::size_t K, std::size_t D) {
  LayeredEmbedding s(m, g, L, K, D);
  const auto v = test::random_values(rng, s.data.size(), 10.0);
  std::copy(v.begin(), v.end(), s.data.begin());
  return s;
}

SynthConfig small_config() {
  SynthConfig c;
  c.utterances = 40;
  c.layers = 3;
  c.dim = 8;
  c.seed = 5;
  return c;
}

std::map<std::string, std::string> read_tree(const std::filesystem::path& root) {
  std::map<std::string, std::string> files;
  for (const auto& e : std::filesystem::recursive_directory_iterator(root)) {
    if (e.is_regular_file()) files[std::filesystem::relative(e.path(), root).string()] = read_text_file(e.path().string());
  }
  return files;
}

}  // namespace

TEST_CASE("stack codec round-trips arbitrary stacks bitwise") {
  Rng rng(1);
  for (int trial = 0; trial < 100; ++trial) {
    const auto m = static_cast<Modality>(rng() % 2);
    const auto g = static_cast<Granularity>(rng() % 5);
    const auto s = random_stack(rng, m, g, 1 + rng() % 5, 1 + rng() % 20, 1 + rng() % 16);
    const auto bytes = encode_stack(s);
    CHECK(bytes.size() == kStackHeaderBytes + 4 * s.data.size());
    const auto back = decode_stack(bytes);
    CHECK(back == s);
    CHECK(std::memcmp(back.data.data(), s.data.data(), s.data.size() * 4) == 0);
  }
}

TEST_CASE("stack codec layout") {
  LayeredEmbedding s(Modality::text, Granularity::word, 2, 1, 1);
  s.data = {1.0f, -2.0f};
  const auto b = encode_stack(s);
  const std::vector<std::uint8_t> expected = {'M', 'G', 'E', 'F', 1, 0, 1, 3, 2, 0, 0, 0, 1, 0, 0, 0, 1, 0, 0, 0,
                                              0x00, 0x00, 0x80, 0x3f, 0x00, 0x00, 0x00, 0xc0};
  CHECK(b == expected);
  // L=12, K=100, D=768: 20-byte header plus 12*100*768 floats.
  LayeredEmbedding big(Modality::speech, Granularity::frame, 12, 100, 768);
  CHECK(encode_stack(big).size() == 20 + 12 * 100 * 768 * 4);
}

TEST_CASE("stack codec rejects damaged input with an offset") {
  Rng rng(2);
  const auto bytes = encode_stack(random_stack(rng, Modality::speech, Granularity::frame, 2, 3, 4));
  for (std::size_t cut = 0; cut < bytes.size(); ++cut) {
    const std::span<const std::uint8_t> part(bytes.data(), cut);
    CHECK(thrown_kind([&] { decode_stack(part); }) == ErrorKind::codec);
  }
  auto extra = bytes;
  extra.push_back(0);
  CHECK(thrown_kind([&] { decode_stack(extra); }) == ErrorKind::codec);

  auto magic = bytes;
  magic[0] = 'X';
  CHECK(test::thrown_message([&] { decode_stack(magic); }).find("offset 0") != std::string::npos);
  auto version = bytes;
  version[4] = 9;
  CHECK(test::thrown_message([&] { decode_stack(version); }).find("offset 4") != std::string::npos);
  auto gran = bytes;
  gran[7] = 17;
  CHECK(thrown_kind([&] { decode_stack(gran); }) == ErrorKind::codec);
  auto huge = bytes;
  for (std::size_t i = 8; i < 20; ++i) huge[i] = 0xff;
  CHECK(thrown_kind([&] { decode_stack(huge); }) == ErrorKind::codec);
  auto zero = bytes;
  zero[12] = zero[13] = zero[14] = zero[15] = 0;
  CHECK(thrown_kind([&] { decode_stack(zero); }) == ErrorKind::codec);
  auto nan = bytes;
  nan[20] = 0x00, nan[21] = 0x00, nan[22] = 0xc0, nan[23] = 0x7f;
  CHECK(thrown_kind([&] { decode_stack(nan); }) == ErrorKind::codec);
}

TEST_CASE("parse_manifest") {
  const std::string text =
      "a\tSes01\tangry\ts/a.mgef\tt/a.mgef\tal/a.ali\n"
      "b\tSes01\thappy\ts/b.mgef\tt/b.mgef\tal/b.ali\n"
      "# comment\n"
      "c\tSes02\tsad\t/abs/c.mgef\tt/c.mgef\tal/c.ali\n"
      "d\tSes02\tneutral\ts/d.mgef\tt/d.mgef\tal/d.ali\n";
  const auto r = parse_manifest(text, "/data");
  REQUIRE(r.size() == 4);
  CHECK(r[1].label == 1);
  CHECK(label_index("happy") == 1);
  CHECK(r[0].speech_stack_path == "/data/s/a.mgef");
  CHECK(r[2].speech_stack_path == "/abs/c.mgef");
  CHECK(parse_manifest(serialize_manifest(r, "/data"), "/data") == r);

  const auto dup = test::thrown_message([&] { parse_manifest(text + "b\tSes03\tsad\tx\ty\tz\n"); });
  CHECK(dup.find("'b'") != std::string::npos);
  CHECK(thrown_kind([] { parse_manifest("a\tSes01\tangry\tx\ty\n"); }) == ErrorKind::parse);
  const auto unknown = test::thrown_message([] { parse_manifest("a\tSes01\tangry\tx\ty\tz\nb\tS\tbored\tx\ty\tz\n"); });
  CHECK(unknown.find("line 2") != std::string::npos);
}

TEST_CASE("synthetic class counts follow the configured distribution") {
  SynthConfig c;
  const auto counts = synthetic_class_counts(c);
  CHECK(counts[0] + counts[1] + counts[2] + counts[3] == 400);
  // 400 * (1103, 1636, 1084, 1708) / 5531 by largest remainder.
  CHECK(counts == std::array<std::size_t, 4>{80, 118, 78, 124});
  const auto plan = synthetic_plan(c);
  std::array<std::size_t, 4> seen{};
  for (std::size_t l : plan.labels) ++seen[l];
  CHECK(seen == counts);

  c.utterances = 5531;
  CHECK(synthetic_class_counts(c) == std::array<std::size_t, 4>{1103, 1636, 1084, 1708});

  c.utterances = 19;
  CHECK(thrown_kind([&] { c.validate(); }) == ErrorKind::config);
}

TEST_CASE("synthetic sessions contain every class") {
  const auto plan = synthetic_plan(SynthConfig{});
  std::map<std::string, std::set<std::size_t>> per_session;
  for (std::size_t i = 0; i < plan.labels.size(); ++i) per_session[plan.sessions[i]].insert(plan.labels[i]);
  CHECK(per_session.size() == 5);
  for (const auto& [s, classes] : per_session) CHECK(classes.size() == 4);
}

TEST_CASE("synthetic alignments satisfy the tier invariants") {
  SynthConfig c = small_config();
  c.utterances = 60;
  const auto dirs = synthetic_directions(c);
  for (std::size_t i = 0; i < 60; ++i) {
    const auto u = synthesize_utterance(c, dirs, i, i % 4);
    CHECK_NOTHROW(validate_alignment(u.alignment, u.speech.positions));
    CHECK(u.alignment.phones.front().start == 0);
    CHECK(u.alignment.words.back().end == u.speech.positions);
    CHECK(u.speech.layers == c.layers);
    CHECK(u.text.dim == c.dim);
  }
}

TEST_CASE("synthetic speech signal survives pooling only under the segmental scheme") {
  SynthConfig c = small_config();
  c.scheme = SynthScheme::segmental;
  c.content_scale = 0.0;
  c.noise = 0.0;
  c.emit_syllables = true;
  const auto dirs = synthetic_directions(c);
  auto project = [&](std::span<const float> row) {
    double p = 0;
    for (std::size_t d = 0; d < row.size(); ++d) p += row[d] * dirs.speech[d];
    return p;
  };
  for (std::size_t i = 0; i < 20; ++i) {
    const std::size_t label = i % 4;
    const auto u = synthesize_utterance(c, dirs, i, label);
    const auto levels = derive_speech_levels(u.speech, u.alignment, {Granularity::syllable}, arpabet_vowels(), {});
    const auto& syl = levels.at(Granularity::syllable);
    for (std::size_t k = 0; k < syl.positions; ++k) {
      const double p = project(syl.row(0, k)) / 0.5;  // layer 0 gain
      if (label == 2) CHECK(std::abs(std::abs(p) - c.speech_scale) <= 1e-4);
    }
  }
}

TEST_CASE("generate_synthetic is deterministic and loadable") {
  test::TempDir a("synth_a"), b("synth_b");
  const auto cfg = small_config();
  const auto records = generate_synthetic(cfg, a.str());
  generate_synthetic(cfg, b.str());
  CHECK(read_tree(a.path()) == read_tree(b.path()));
  CHECK(records.size() == 40);

  const auto loaded = load_manifest(a.str("manifest.tsv"));
  CHECK(loaded == records);
  CHECK_NOTHROW(check_manifest_files(loaded));

  std::vector<std::string> lines;
  LoadOptions options;
  options.speech_levels = {Granularity::frame, Granularity::phone, Granularity::syllable, Granularity::word};
  options.log = [&](const std::string& l) { lines.push_back(l); };
  const auto ex = load_example(loaded[0], options);
  CHECK(ex.speech.size() == 4);
  CHECK(ex.speech.at(Granularity::phone).positions < ex.speech.at(Granularity::frame).positions);
  REQUIRE(lines.size() == 1);
  CHECK(lines[0].find("syllables derived from phones") != std::string::npos);

  SynthConfig other = cfg;
  other.seed = 6;
  test::TempDir d("synth_c");
  generate_synthetic(other, d.str());
  CHECK(read_tree(a.path()) != read_tree(d.path()));
}

TEST_CASE("loading reports missing tiers and files by utterance") {
  test::TempDir dir("load");
  auto records = generate_synthetic(small_config(), dir.str());
  write_text_file(records[3].alignment_path, "#stride_ms 20\nphone 0 2 AH\n");
  LoadOptions options;
  options.speech_levels = {Granularity::word};
  const auto msg = test::thrown_message([&] { load_example(records[3], options); });
  CHECK(msg.find(records[3].id) != std::string::npos);
  CHECK(thrown_kind([&] { load_example(records[3], options); }) == ErrorKind::validation);

  std::filesystem::remove(records[5].text_stack_path);
  CHECK(thrown_kind([&] { check_manifest_files(records); }) == ErrorKind::validation);
}
