// SPDX-License-Identifier: Apache-2.0
//
// cfad - grant-free activity detection for cell-free massive MIMO
// Copyright (C) 2026 The cfad authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#include "cfad/clustering.hpp"
#include "cfad/impairments.hpp"

#include <doctest.h>

#include <algorithm>
#include <set>

using namespace cfad;

TEST_CASE("top-T selection") {
    Eigen::MatrixXd beta(4, 1);
    beta << 1e-5, 1e-8, 1e-6, 1e-7;
    const auto c = select_clusters(beta, 2);
    REQUIRE(c.num_devices() == 1);
    CHECK(c.row(0)[0] == 0);
    CHECK(c.row(0)[1] == 2);
}

TEST_CASE("ties resolve to the lower AP index") {
    Eigen::MatrixXd beta(4, 1);
    beta << 1.0, 2.0, 2.0, 1.0;
    const auto c = select_clusters(beta, 3);
    CHECK(std::vector<int>(c.row(0).begin(), c.row(0).end()) == std::vector<int>{1, 2, 0});
}

TEST_CASE("random assignments satisfy the ordering contract") {
    Rng rng(4);
    std::normal_distribution<double> g(-100, 15);
    for (int rep = 0; rep < 50; ++rep) {
        Eigen::MatrixXd beta_db(9, 13);
        for (Eigen::Index i = 0; i < beta_db.size(); ++i) beta_db(i) = g(rng);
        const Eigen::MatrixXd beta = (beta_db.array() / 10.0 * std::log(10.0)).exp();
        const int t = 1 + rep % 9;
        const auto c = select_clusters(beta, t);
        for (int k = 0; k < 13; ++k) {
            const auto row = c.row(k);
            std::set<int> distinct(row.begin(), row.end());
            CHECK(distinct.size() == static_cast<std::size_t>(t));
            for (int i = 0; i + 1 < t; ++i) CHECK(beta(row[i], k) >= beta(row[i + 1], k));
            // Brute force: nothing outside the cluster beats its weakest member.
            for (int m = 0; m < 9; ++m)
                if (!distinct.contains(m)) CHECK(beta(m, k) <= beta(row[t - 1], k));
        }
        // Scale and representation invariance.
        CHECK(select_clusters(beta * 123.0, t) == c);
        CHECK(select_clusters(beta_db, t) == c);
        if (t == 9)
            for (int k = 0; k < 13; ++k) {
                std::vector<int> row(c.row(k).begin(), c.row(k).end());
                std::ranges::sort(row);
                CHECK(row == std::vector<int>{0, 1, 2, 3, 4, 5, 6, 7, 8});
            }
    }
}

TEST_CASE("clustering follows the perturbed coefficients") {
    SystemConfig cfg;
    Rng rng(8);
    const auto dep = place_network(cfg, rng);
    const auto f = compute_beta(dep, cfg, rng);
    const auto base = select_clusters(f.beta_lin, 4);

    Rng r0(1);
    CHECK(select_clusters(perturb_beta(f, {0.0, FadingDomain::db}, r0).beta_lin, 4) == base);

    auto changed_fraction = [&](double theta) {
        Rng r(2);
        const auto c = select_clusters(perturb_beta(f, {theta, FadingDomain::db}, r).beta_lin, 4);
        int changed = 0;
        for (std::size_t i = 0; i < c.indices().size(); ++i) changed += c.indices()[i] != base.indices()[i];
        return double(changed) / c.indices().size();
    };
    const double big = changed_fraction(0.3);
    const double small = changed_fraction(0.01);
    CHECK(big > 0.0);
    CHECK(small < big);
    CHECK(changed_fraction(1e-6) == 0.0);
}

TEST_CASE("invalid cluster requests") {
    Eigen::MatrixXd beta = Eigen::MatrixXd::Ones(3, 2);
    CHECK_THROWS_AS(select_clusters(beta, 4), std::invalid_argument);
    CHECK_THROWS_AS(select_clusters(beta, 0), std::invalid_argument);
    beta(1, 1) = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(select_clusters(beta, 2), std::invalid_argument);
}

TEST_CASE("gathering cluster blocks") {
    ReceivedSignal y(4, 2, 3);
    for (int m = 0; m < 4; ++m)
        for (int n = 0; n < 2; ++n)
            for (int l = 0; l < 3; ++l) y.at(m, n, l) = {100.0 * m + 10 * n + l, -1.0 * m};

    const ClusterAssignment c(2, 4, {3, 0, 2, 1, 1, 2, 3, 0});
    const auto blocks = gather_cluster_signals(y, c, 0);
    REQUIRE(blocks.size() == 4);
    const int order[] = {3, 0, 2, 1};
    for (int t = 0; t < 4; ++t) {
        REQUIRE(blocks[t].rows() == 2);
        REQUIRE(blocks[t].cols() == 3);
        for (int n = 0; n < 2; ++n)
            for (int l = 0; l < 3; ++l) CHECK(blocks[t](n, l) == y.at(order[t], n, l));
    }

    const ClusterAssignment single(1, 1, {2});
    const auto one = gather_cluster_signals(y, single, 0);
    REQUIRE(one.size() == 1);
    CHECK(one[0] == y.block(2));

    CHECK_THROWS_AS(gather_cluster_signals(y, c, 2), std::out_of_range);
    CHECK_THROWS_AS(gather_cluster_signals(y, ClusterAssignment(1, 1, {7}), 0), std::out_of_range);
}
