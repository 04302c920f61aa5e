#pragma once

#include "errors.hpp"
#include "moebius.hpp"
#include "word.hpp"
#include "group.hpp"
#include "curves.hpp"
#include "identities.hpp"
#include "continuation.hpp"
#include "io.hpp"
