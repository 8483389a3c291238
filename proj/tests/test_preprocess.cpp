#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <set>
#include <sstream>

#include "idsgan/data.hpp"
#include "idsgan/errors.hpp"
#include "support.hpp"

namespace idsgan::data {
namespace {

RawTable parse(const std::string& text) {
  std::istringstream in(text);
  return parse_csv(in, true);
}

TEST(Encoders, SortedOrderCodes) {
  const RawTable t = parse("proto,label\ntcp,a\nicmp,b\ntcp,a\n");
  const std::size_t cols[] = {0};
  const EncoderState s = fit_label_encoders(t, cols);
  EXPECT_EQ(s.vocabularies.at(0), (std::vector<std::string>{"icmp", "tcp"}));
  const NumericTable n = apply_label_encoders(t, s, cols);
  EXPECT_EQ(n.values, (std::vector<double>{1, 0, 1}));
}

TEST(Encoders, SingleValueGivesZeros) {
  const RawTable t = parse("proto,label\nudp,a\nudp,b\n");
  const std::size_t cols[] = {0};
  const NumericTable n = apply_label_encoders(t, fit_label_encoders(t, cols), cols);
  EXPECT_EQ(n.values, (std::vector<double>{0, 0}));
}

TEST(Encoders, DecodeInvertsEncode) {
  const RawTable t = parse("proto,flag\ntcp,SF\nudp,S0\nicmp,REJ\ntcp,S0\n");
  const std::size_t cols[] = {0, 1};
  const EncoderState s = fit_label_encoders(t, cols);
  for (const auto& row : t.rows) {
    for (std::size_t c : cols) EXPECT_EQ(s.decode(c, s.encode(c, row[c])), row[c]);
  }
}

TEST(Encoders, UnseenCategoryNamesColumnAndValue) {
  const RawTable fit = parse("proto,label\ntcp,a\n");
  const RawTable other = parse("proto,label\nsctp,a\n");
  const std::size_t cols[] = {0};
  const EncoderState s = fit_label_encoders(fit, cols);
  try {
    apply_label_encoders(other, s, cols);
    FAIL() << "expected DomainError";
  } catch (const DomainError& e) {
    EXPECT_NE(std::string(e.what()).find("sctp"), std::string::npos);
    EXPECT_NE(std::string(e.what()).find('0'), std::string::npos);
  }
}

TEST(Encoders, NonNumericRowsDroppedAndCounted) {
  const RawTable t = parse("x,y,label\n1,2,a\n3,Infinity,b\n4,NaN,a\n5,oops,b\n6,7,a\n");
  const std::size_t cols[] = {0, 1};
  const NumericTable n = apply_label_encoders(t, EncoderState{}, cols);
  EXPECT_EQ(n.rows(), 2u);
  EXPECT_EQ(n.dropped_rows, 3u);
  EXPECT_EQ(n.source_rows, (std::vector<std::size_t>{0, 4}));
}

TEST(Scaler, Examples) {
  const std::vector<double> col{2, 4, 6};
  EXPECT_EQ(apply_minmax(col, fit_minmax(col, 1)), (std::vector<double>{0, 0.5, 1}));
  const std::vector<double> constant{5, 5, 5};
  EXPECT_EQ(apply_minmax(constant, fit_minmax(constant, 1)), (std::vector<double>{0, 0, 0}));
}

TEST(Scaler, TestValuesOutsideRangeArePreserved) {
  const std::vector<double> train{10, 20};
  const ScalerState s = fit_minmax(train, 1);
  const std::vector<double> test{5, 25};
  EXPECT_EQ(apply_minmax(test, s), (std::vector<double>{-0.5, 1.5}));
}

TEST(Scaler, TrainingSplitMapsIntoUnitInterval) {
  const auto x = idsgan::testing::random_tensor({50, 6}, 3, -100, 100).vector();
  const ScalerState s = fit_minmax(x, 6);
  for (std::size_t c = 0; c < 6; ++c) EXPECT_LE(s.min[c], s.max[c]);
  for (double v : apply_minmax(x, s)) {
    EXPECT_GE(v, 0.0);
    EXPECT_LE(v, 1.0);
  }
}

TEST(Scaler, Errors) {
  const std::vector<double> x{1, 2, 3};
  EXPECT_THROW(fit_minmax(x, 2), ShapeError);
  EXPECT_THROW(fit_minmax({}, 2), UsageError);
}

TEST(Split, EightyTwenty) {
  std::vector<int> labels(100, 0);
  const SplitIndices s = stratified_split(labels, 0.8, 1);
  EXPECT_EQ(s.train.size(), 80u);
  EXPECT_EQ(s.test.size(), 20u);
}

TEST(Split, PartitionAndStratificationOnRandomLabels) {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 30; ++trial) {
    std::uniform_int_distribution<int> label(0, 1 + trial % 4);
    std::vector<int> labels(20 + 7 * trial);
    for (int& y : labels) y = label(rng);
    const double ratio = 0.5 + 0.01 * trial;
    const SplitIndices s = stratified_split(labels, ratio, trial);
    std::vector<std::size_t> all(s.train);
    all.insert(all.end(), s.test.begin(), s.test.end());
    std::sort(all.begin(), all.end());
    for (std::size_t i = 0; i < labels.size(); ++i) ASSERT_EQ(all[i], i);
    EXPECT_TRUE(std::is_sorted(s.train.begin(), s.train.end()));
    EXPECT_TRUE(std::is_sorted(s.test.begin(), s.test.end()));
    std::map<int, double> total, in_train;
    for (int y : labels) total[y] += 1;
    for (std::size_t i : s.train) in_train[labels[i]] += 1;
    for (auto [y, n] : total) EXPECT_LE(std::abs(in_train[y] - ratio * n), 1.0);
    const SplitIndices again = stratified_split(labels, ratio, trial);
    EXPECT_EQ(again.train, s.train);
  }
}

TEST(Split, SingletonClassGoesToTrainWithWarning) {
  const std::vector<int> labels{0, 0, 0, 0, 1};
  const SplitIndices s = stratified_split(labels, 0.8, 1);
  EXPECT_NE(std::find(s.train.begin(), s.train.end(), 4u), s.train.end());
  EXPECT_EQ(s.warnings.size(), 1u);
}

TEST(Split, RatioOutOfRange) {
  const std::vector<int> labels{0, 1};
  EXPECT_THROW(stratified_split(labels, 1.0, 1), UsageError);
  EXPECT_THROW(stratified_split(labels, 0.0, 1), UsageError);
}

TEST(Subsample, KeepsEveryClassAndRespectsLimit) {
  std::vector<int> labels(1000, 0);
  for (int i = 0; i < 3; ++i) labels[i * 100] = 1;
  const auto idx = stratified_subsample(labels, 100, 2);
  EXPECT_LE(idx.size(), 100u);
  EXPECT_TRUE(std::any_of(idx.begin(), idx.end(), [&](std::size_t i) { return labels[i] == 1; }));
  EXPECT_TRUE(std::is_sorted(idx.begin(), idx.end()));
  EXPECT_EQ(stratified_subsample(labels, 0, 2).size(), 1000u);
}

TEST(KddLabels, Taxonomy) {
  EXPECT_EQ(map_kdd_label("normal."), 0);
  EXPECT_EQ(map_kdd_label("smurf."), 1);
  EXPECT_EQ(map_kdd_label("buffer_overflow."), 2);
  EXPECT_EQ(map_kdd_label("ipsweep"), 3);
  EXPECT_EQ(map_kdd_label(" guess_passwd. "), 4);
  EXPECT_THROW(map_kdd_label("martian."), DomainError);
  EXPECT_EQ(KddCategoryMap::category_names(),
            (std::vector<std::string>{"normal", "DoS", "U2R", "Probe", "R2L"}));
}

TEST(KddLabels, CustomMapFile) {
  const auto map = KddCategoryMap::parse("# comment\nfoo DoS\nbar normal\n");
  EXPECT_EQ(map.size(), 2u);
  EXPECT_EQ(map.category("foo."), 1);
  EXPECT_THROW(KddCategoryMap::parse("foo Martian\n"), ParseError);
  EXPECT_THROW(KddCategoryMap::parse("# nothing\n"), ParseError);
}

TEST(CicidsLabels, Binarize) {
  EXPECT_EQ(binarize_cicids_label("BENIGN"), 0);
  EXPECT_EQ(binarize_cicids_label(" Benign "), 0);
  EXPECT_EQ(binarize_cicids_label("DDoS"), 1);
  EXPECT_EQ(binarize_cicids_label("PortScan"), 1);
}

TEST(Selection, VarianceRanking) {
  // Column variances 0, 1, 2 (population): constant, +-1, +-sqrt(2).
  const double r = std::sqrt(2.0);
  const std::vector<double> x{5, -1, -r, 5, 1, r};
  const FeatureSelection s = fit_variance_selection(x, 3, 2);
  EXPECT_EQ(s.columns, (std::vector<std::size_t>{1, 2}));
  EXPECT_NEAR(s.variances[0], 0.0, 1e-15);
  EXPECT_NEAR(s.variances[1], 1.0, 1e-15);
  EXPECT_NEAR(s.variances[2], 2.0, 1e-15);
  EXPECT_EQ(apply_selection(x, s), (std::vector<double>{-1, -r, 1, r}));
}

TEST(Selection, IdentityAndTies) {
  const std::vector<double> x{0, 0, 0, 1, 1, 1};
  EXPECT_EQ(fit_variance_selection(x, 3, 3).columns, (std::vector<std::size_t>{0, 1, 2}));
  EXPECT_EQ(fit_variance_selection(x, 3, 1).columns, (std::vector<std::size_t>{0}));
  EXPECT_THROW(fit_variance_selection(x, 3, 4), UsageError);
}

Dataset small_dataset() {
  Dataset d;
  d.width = 2;
  d.class_names = {"a", "b"};
  for (int i = 0; i < 100; ++i) {
    d.features.push_back(i / 100.0);
    d.features.push_back(1.0 - i / 100.0);
    d.labels.push_back(i % 5 == 0 ? 1 : 0);
    d.provenance.push_back(Provenance::real);
    d.row_ids.push_back(static_cast<std::size_t>(i));
  }
  return d;
}

TEST(Augment, EmptyMapIsIdentity) {
  const Dataset d = small_dataset();
  const Dataset a = augment(d, {});
  EXPECT_EQ(a.features, d.features);
  EXPECT_EQ(a.labels, d.labels);
}

TEST(Augment, AppendsLabelledSyntheticRows) {
  const Dataset d = small_dataset();
  const Dataset copy = d;
  std::map<int, Tensor> synth;
  synth.emplace(1, Tensor({20, 2, 1}, std::vector<double>(40, 0.5)));
  const Dataset a = augment(d, synth);
  EXPECT_EQ(a.rows(), 120u);
  EXPECT_EQ(a.class_counts(), (std::vector<std::size_t>{80, 40}));
  const Composition c = a.composition();
  EXPECT_EQ(c.real, 100u);
  EXPECT_EQ(c.synthetic, 20u);
  EXPECT_EQ(c.synthetic_per_class, (std::vector<std::size_t>{0, 20}));
  for (std::size_t i = 100; i < 120; ++i) {
    EXPECT_EQ(a.provenance[i], Provenance::synthetic);
    EXPECT_EQ(a.row_ids[i], Dataset::kSyntheticRow);
  }
  EXPECT_TRUE(std::equal(d.features.begin(), d.features.end(), a.features.begin()));
  EXPECT_EQ(d.features, copy.features);
}

TEST(Augment, MixtureProportionsExact) {
  const Dataset d = small_dataset();
  std::map<int, Tensor> synth;
  synth.emplace(0, Tensor::zeros({7, 2}));
  synth.emplace(1, Tensor::zeros({13, 2}));
  const Dataset a = augment(d, synth);
  const auto counts = a.class_counts();
  EXPECT_DOUBLE_EQ(static_cast<double>(counts[1]) / a.rows(), (20.0 + 13.0) / 120.0);
}

TEST(Augment, WidthMismatch) {
  std::map<int, Tensor> synth;
  synth.emplace(1, Tensor::zeros({3, 5, 1}));
  EXPECT_THROW(augment(small_dataset(), synth), ShapeError);
}

TEST(Dataset, ValidateCatchesBrokenInvariants) {
  Dataset d = small_dataset();
  d.labels[3] = 7;
  EXPECT_THROW(d.validate(), DomainError);
  d = small_dataset();
  d.features.pop_back();
  EXPECT_THROW(d.validate(), ShapeError);
}

TEST(Prepare, KddFixture) {
  const RawTable raw = load_csv(IDSGAN_TEST_DATA_DIR "/kdd_sample.csv", false);
  EXPECT_EQ(raw.rows[0].back().back(), '.');
  PrepareOptions o;
  o.kind = DatasetKind::kdd;
  o.seed = 3;
  const PreparedData p = prepare(raw, o);
  EXPECT_EQ(p.train.width, 30u);
  EXPECT_EQ(p.test.width, 30u);
  EXPECT_EQ(p.train.class_count(), 5u);
  EXPECT_EQ(p.train.rows() + p.test.rows(), 297u - p.stats.duplicate_rows);
  EXPECT_EQ(p.feature_names.size(), 30u);
  EXPECT_TRUE(p.encoders.is_categorical(1));
  EXPECT_TRUE(p.encoders.is_categorical(3));
  for (double v : p.train.features) {
    EXPECT_GE(v, 0.0);
    EXPECT_LE(v, 1.0);
  }
  const auto counts = p.train.class_counts();
  for (std::size_t k = 0; k < 5; ++k) EXPECT_GT(counts[k], 0u) << k;
}

TEST(Prepare, CicidsFixture) {
  const RawTable raw = load_csv(IDSGAN_TEST_DATA_DIR "/cicids_sample.csv", true);
  PrepareOptions o;
  o.kind = DatasetKind::cicids;
  o.seed = 1;
  const PreparedData p = prepare(raw, o);
  EXPECT_EQ(p.stats.duplicate_rows, 1u);
  EXPECT_EQ(p.stats.dropped_rows, 11u);
  EXPECT_EQ(p.train.rows() + p.test.rows(), 209u);
  EXPECT_EQ(p.train.width, 78u);
  EXPECT_EQ(p.train.class_names, (std::vector<std::string>{"BENIGN", "ATTACK"}));
  EXPECT_FALSE(p.warnings.empty());
}

TEST(Prepare, AuditShowsTestRowsNeverFitted) {
  const RawTable raw = load_csv(IDSGAN_TEST_DATA_DIR "/kdd_sample.csv", false);
  PrepareOptions o;
  o.kind = DatasetKind::kdd;
  const PreparedData p = prepare(raw, o);
  const std::set<std::size_t> test_ids(p.test.row_ids.begin(), p.test.row_ids.end());
  std::size_t checked = 0;
  for (const AuditEntry& e : p.audit) {
    if (e.stage == "label_encoder_fit") continue;
    ++checked;
    EXPECT_EQ(e.source, "train");
    for (std::size_t id : e.row_ids) EXPECT_FALSE(test_ids.contains(id)) << e.stage;
  }
  EXPECT_EQ(checked, 2u);
  for (Provenance pr : p.test.provenance) EXPECT_EQ(pr, Provenance::real);
}

TEST(Prepare, DeterministicForSeed) {
  const RawTable raw = load_csv(IDSGAN_REPO_DATA_DIR "/toy.csv", true);
  PrepareOptions o;
  o.seed = 5;
  const PreparedData a = prepare(raw, o);
  const PreparedData b = prepare(raw, o);
  EXPECT_EQ(a.train.features, b.train.features);
  EXPECT_EQ(a.test.row_ids, b.test.row_ids);
  EXPECT_EQ(a.train.width, 8u);
  EXPECT_EQ(a.train.class_names, (std::vector<std::string>{"attack", "normal"}));
}

TEST(Prepare, MaxRowsSubsamples) {
  const RawTable raw = load_csv(IDSGAN_REPO_DATA_DIR "/toy.csv", true);
  PrepareOptions o;
  o.max_rows = 100;
  const PreparedData p = prepare(raw, o);
  EXPECT_LE(p.train.rows() + p.test.rows(), 100u);
}

TEST(DatasetKind, Names) {
  for (auto k : {DatasetKind::kdd, DatasetKind::cicids, DatasetKind::generic}) {
    EXPECT_EQ(dataset_kind_from_string(to_string(k)), k);
  }
  EXPECT_THROW(dataset_kind_from_string("unsw"), UsageError);
  EXPECT_EQ(default_feature_width(DatasetKind::kdd), 30u);
  EXPECT_EQ(default_feature_width(DatasetKind::cicids), 78u);
}

}  // namespace
}  // namespace idsgan::data
