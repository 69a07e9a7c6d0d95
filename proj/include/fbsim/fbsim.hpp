// SPDX-License-Identifier: Apache-2.0
//
// fbsim: multi-user MIMO downlink simulator with limited channel feedback
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

#ifndef FBSIM_FBSIM_HPP
#define FBSIM_FBSIM_HPP

#include "fbsim/analytic.hpp"
#include "fbsim/channel.hpp"
#include "fbsim/config.hpp"
#include "fbsim/errors.hpp"
#include "fbsim/montecarlo.hpp"
#include "fbsim/numerics.hpp"
#include "fbsim/presets.hpp"
#include "fbsim/quantization.hpp"
#include "fbsim/report.hpp"
#include "fbsim/schemes.hpp"

#endif
