#include <gtest/gtest.h>

#include "navarena/config.hpp"

using namespace navarena;

TEST(TrainSetup, EmptyTextKeepsDefaults) {
  const TrainSetup s = parse_train_setup("");
  const TrainSetup d;
  EXPECT_EQ(format_train_setup(s), format_train_setup(d));
  EXPECT_EQ(s.train.gamma, 0.99);
  EXPECT_EQ(s.train.rollout_length, 32);
}

TEST(TrainSetup, FormatParsesBackIdentically) {
  TrainSetup s;
  s.train.learning_rate = 1e-4;
  s.train.n_workers = 3;
  s.train.use_gae = true;
  s.train.seed = 1234567890123ULL;
  s.train.curriculum.max_obstacles = 20;
  s.env.trivial = true;
  s.env.world.lidar_noise_std = 0.01;
  const std::string text = format_train_setup(s);
  const TrainSetup back = parse_train_setup(text);
  EXPECT_EQ(format_train_setup(back), text);
  EXPECT_EQ(back.train.learning_rate, 1e-4);
  EXPECT_EQ(back.train.seed, 1234567890123ULL);
  EXPECT_TRUE(back.env.trivial);
}

TEST(TrainSetup, PartialSectionsOverrideOnlyTheirKeys) {
  const TrainSetup s = parse_train_setup("[train]\nworkers = 2\n[curriculum]\nwindow = 50\n");
  EXPECT_EQ(s.train.n_workers, 2);
  EXPECT_EQ(s.train.curriculum.window, 50);
  EXPECT_EQ(s.train.gamma, TrainConfig{}.gamma);
}

TEST(TrainSetup, Rejections) {
  EXPECT_THROW(parse_train_setup("[train]\nbogus = 1\n"), ConfigError);
  EXPECT_THROW(parse_train_setup("[trainer]\nworkers = 1\n"), ConfigError);
  EXPECT_THROW(parse_train_setup("[train]\nworkers = many\n"), ConfigError);
  EXPECT_THROW(parse_train_setup("workers = 1\n"), ConfigError);
  EXPECT_THROW(load_train_setup("/nonexistent/train.ini"), ConfigError);
}
