// Copyright 2026 The KWS Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef KWS_ENGINE_KERNELS_INTERNAL_H_
#define KWS_ENGINE_KERNELS_INTERNAL_H_

#include "kws/engine/kernels.h"

namespace kws::engine::detail {

Tensor conv2d_int(const Tensor& input, const LayerSpec& layer, AccumulatorRange* range);
Tensor mul_add_int(const Tensor& input, const LayerSpec& layer, AccumulatorRange* range);
Tensor maxpool2d_int(const Tensor& input, const LayerSpec& layer);
Tensor global_mean_int(const Tensor& input, AccumulatorRange* range);
Tensor fully_connected_int(const Tensor& input, const LayerSpec& layer,
                           AccumulatorRange* range);
Tensor logistic_int(const Tensor& input, const LayerSpec& layer);
Tensor relu_int(const Tensor& input);

}  // namespace kws::engine::detail

#endif  // KWS_ENGINE_KERNELS_INTERNAL_H_
