// Copyright 2026 The sswm Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef SSWM_SSWM_HPP_
#define SSWM_SSWM_HPP_

#include "sswm/channel.hpp"
#include "sswm/codebook.hpp"
#include "sswm/errors.hpp"
#include "sswm/harness.hpp"
#include "sswm/media.hpp"
#include "sswm/optimizer.hpp"
#include "sswm/rng.hpp"
#include "sswm/spread.hpp"
#include "sswm/trellis.hpp"
#include "sswm/watermarker.hpp"

#endif  // SSWM_SSWM_HPP_
