// Copyright (C) 2026 The lmvpr Authors
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include "lmvpr/block_io.hpp"
#include "lmvpr/coverage.hpp"
#include "lmvpr/descriptors.hpp"
#include "lmvpr/error.hpp"
#include "lmvpr/geometry.hpp"
#include "lmvpr/image.hpp"
#include "lmvpr/manifest.hpp"
#include "lmvpr/matching.hpp"
#include "lmvpr/pipeline.hpp"
#include "lmvpr/projection.hpp"
#include "lmvpr/proposals.hpp"
#include "lmvpr/similarity.hpp"
#include "lmvpr/study.hpp"
#include "lmvpr/timing.hpp"
