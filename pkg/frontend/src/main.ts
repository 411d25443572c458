import { ApiClient } from "./api.js";
import { setupApp } from "./app.js";
import { ChatStore } from "./store.js";

setupApp(document.getElementById("app")!, new ApiClient(), new ChatStore());
