#pragma once

#include "catqfi/channels.hpp"
#include "catqfi/closed_form.hpp"
#include "catqfi/error.hpp"
#include "catqfi/families.hpp"
#include "catqfi/fock.hpp"
#include "catqfi/qfi.hpp"
