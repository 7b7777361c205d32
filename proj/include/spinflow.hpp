/*
 * Copyright 2026 The spinflow Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#pragma once

#include "spinflow/analysis.hpp"
#include "spinflow/bcf.hpp"
#include "spinflow/cli.hpp"
#include "spinflow/config.hpp"
#include "spinflow/ensemble.hpp"
#include "spinflow/error.hpp"
#include "spinflow/field.hpp"
#include "spinflow/integrator.hpp"
#include "spinflow/io.hpp"
#include "spinflow/noise.hpp"
#include "spinflow/philox.hpp"
#include "spinflow/statistics.hpp"
#include "spinflow/sweep.hpp"
#include "spinflow/vec3.hpp"
