#include <filesystem>
#include <fstream>
#include <random>

#include <gtest/gtest.h>

#include "sopf/benchmark_systems.hpp"
#include "sopf/dataset_io.hpp"
#include "sopf/model_io.hpp"
#include "support/test_support.hpp"

namespace sopf {
namespace {

namespace fs = std::filesystem;

class IoTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("sopf_io_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  fs::path dir_;
};

TEST_F(IoTest, TimeCsvRoundTrip) {
  std::mt19937_64 rng(1);
  const Matrix data = testing::random_matrix(3, 7, rng);
  const auto t = linspace(0.0, 1.0, 7);
  io::write_time_csv(dir_ / "x.csv", t, data, "x");
  std::ifstream in(dir_ / "x.csv");
  std::string header;
  std::getline(in, header);
  EXPECT_EQ(header, "t,x_1,x_2,x_3");
  const io::TimeTable table = io::read_time_csv(dir_ / "x.csv");
  EXPECT_EQ(table.names, (std::vector<std::string>{"x_1", "x_2", "x_3"}));
  EXPECT_EQ(table.t, t);
  EXPECT_EQ(table.data, data);
}

TEST_F(IoTest, BinaryRoundTrip) {
  std::mt19937_64 rng(2);
  const Matrix m = testing::random_matrix(5, 4, rng);
  io::write_binary(dir_ / "m.bin", m);
  EXPECT_EQ(io::read_binary(dir_ / "m.bin"), m);
  std::ifstream in(dir_ / "m.bin", std::ios::binary);
  std::string header;
  std::getline(in, header);
  EXPECT_EQ(header, "SOPF1 5 4");
  double first = 0.0;
  in.read(reinterpret_cast<char*>(&first), sizeof first);
  EXPECT_EQ(first, m(0, 0));
  double second = 0.0;
  in.read(reinterpret_cast<char*>(&second), sizeof second);
  EXPECT_EQ(second, m(0, 1));
  EXPECT_EQ(fs::file_size(dir_ / "m.bin"), header.size() + 1 + 20 * sizeof(double));
}

TEST_F(IoTest, MalformedFilesThrow) {
  std::ofstream(dir_ / "bad.bin") << "NOPE 1 1\n";
  EXPECT_THROW(io::read_binary(dir_ / "bad.bin"), std::runtime_error);
  std::ofstream(dir_ / "bad.csv") << "t,x_1\n0,abc\n";
  EXPECT_THROW(io::read_time_csv(dir_ / "bad.csv"), std::runtime_error);
  EXPECT_THROW(io::read_time_csv(dir_ / "missing.csv"), std::runtime_error);
  std::ofstream(dir_ / "bad.json") << "{\"format\": \"other\"}";
  EXPECT_THROW(io::read_model(dir_ / "bad.json"), std::runtime_error);
}

TEST_F(IoTest, LossHistory) {
  io::write_loss_history(dir_ / "loss.csv", {3.0, 2.0, 1.5});
  std::ifstream in(dir_ / "loss.csv");
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "step,loss");
  std::getline(in, line);
  EXPECT_EQ(line, "0,3");
}

TEST_F(IoTest, ModelRoundTripWithCertificate) {
  const auto p = StableParametrization::gaussian(3, 2, 0.3, 4, true);
  io::ModelDocument doc{"stable_generalized", materialize(p), p, {{"seed", 4}}, {}, {}};
  io::write_model(dir_ / "model.json", doc);
  const io::ModelDocument back = io::read_model(dir_ / "model.json");
  EXPECT_EQ(back.kind, "stable_generalized");
  EXPECT_EQ(back.system.A(), doc.system.A());
  EXPECT_EQ(back.system.H(), doc.system.H());
  EXPECT_EQ(back.system.B(), doc.system.B());
  ASSERT_TRUE(back.parametrization);
  EXPECT_EQ(back.parametrization->flatten(), p.flatten());
  EXPECT_EQ(back.config["seed"], 4);
  EXPECT_TRUE(back.certificate["certified"].get<bool>());
  EXPECT_TRUE(back.certificate["generalized"].get<bool>());
}

TEST_F(IoTest, CertificateJson) {
  const auto j = io::certificate_to_json(certify(example_one()));
  for (const char* key : {"hurwitz", "abscissa", "sigma_min_R", "energy_preserving_violation",
                          "trapping_radius_per_unit_input"}) {
    EXPECT_TRUE(j.contains(key)) << key;
  }
  EXPECT_NEAR(j["trapping_radius_per_unit_input"].get<double>(), std::sqrt(2.0), 1e-14);
  const auto fail = io::certificate_to_json(certify(QuadraticControlSystem(
      Matrix::Identity(2, 2), Matrix::Zero(2, 4), Matrix::Ones(2, 1))));
  EXPECT_FALSE(fail["certified"].get<bool>());
  EXPECT_TRUE(fail["trapping_radius_per_unit_input"].is_null());
}

}  // namespace
}  // namespace sopf
