/*
 * Copyright 2026 The embedviz Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef EMBEDVIZ_EMBEDVIZ_HPP_
#define EMBEDVIZ_EMBEDVIZ_HPP_

#include "embedviz/classifiers.hpp"
#include "embedviz/data.hpp"
#include "embedviz/metrics.hpp"
#include "embedviz/metrics_table.hpp"
#include "embedviz/pipeline.hpp"
#include "embedviz/smote.hpp"
#include "embedviz/tsne.hpp"
#include "embedviz/viz.hpp"

#endif  // EMBEDVIZ_EMBEDVIZ_HPP_
