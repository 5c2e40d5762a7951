#pragma once

#include "robust_bandits/rng.hpp"
#include "robust_bandits/core.hpp"
#include "robust_bandits/instances.hpp"
#include "robust_bandits/design.hpp"
#include "robust_bandits/learner.hpp"
#include "robust_bandits/phased_elimination.hpp"
#include "robust_bandits/greedy.hpp"
#include "robust_bandits/linucb.hpp"
#include "robust_bandits/thompson.hpp"
#include "robust_bandits/reference_learners.hpp"
#include "robust_bandits/attack_spec.hpp"
#include "robust_bandits/adversaries.hpp"
#include "robust_bandits/harness.hpp"
#include "robust_bandits/config.hpp"
#include "robust_bandits/experiment.hpp"
