import { AnnotatorApp } from "./ui.js";

new AnnotatorApp(document);
