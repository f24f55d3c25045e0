// Copyright 2026 The RidgeSVM Authors. All Rights Reserved.
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


#ifndef RIDGESVM_RIDGESVM_HPP
#define RIDGESVM_RIDGESVM_HPP

#include "ridgesvm/baseline_path.hpp"
#include "ridgesvm/batch_solver.hpp"
#include "ridgesvm/bench.hpp"
#include "ridgesvm/datakit.hpp"
#include "ridgesvm/error.hpp"
#include "ridgesvm/kernels.hpp"
#include "ridgesvm/linalg.hpp"
#include "ridgesvm/model.hpp"
#include "ridgesvm/online_svm.hpp"
#include "ridgesvm/online_svr.hpp"

#endif  // RIDGESVM_RIDGESVM_HPP
